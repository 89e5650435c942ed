use rayon::prelude::*;

use super::samplers::{LevySampler, SubordinatorSampler};
use super::{substream, SimConfig};
use crate::error::{Error, Result};
use crate::levy::LevyTriplet;
use crate::subordinate::{Rect, SeedField};

#[derive(Debug, Clone, PartialEq)]
pub struct FieldCell {
    pub rect: Rect,
    pub area: f64,
    pub value: f64,
}

/// A stored union of cells; its value is the sum of the parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldUnion {
    pub rect: Rect,
    pub parts: Vec<usize>,
    pub value: f64,
}

/// One realisation of `L_T(A)` on the seed cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub cells: Vec<FieldCell>,
    pub unions: Vec<FieldUnion>,
    pub seed: u64,
    pub replicate: u64,
}

impl GridField {
    /// Stores the union of the given cells, which must tile a rectangle.
    pub fn add_union(&mut self, parts: &[usize]) -> Result<&FieldUnion> {
        if parts.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = parts.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != parts.len() || *seen.last().expect("nonempty") >= self.cells.len() {
            return Err(Error::invalid("union parts must be distinct cell indices"));
        }
        let first = self.cells[parts[0]].rect;
        let (mut x0, mut y0, mut x1, mut y1) = (first.x0, first.y0, first.x1, first.y1);
        let mut area = 0.0;
        let mut value = 0.0;
        for &i in parts {
            let c = &self.cells[i];
            x0 = x0.min(c.rect.x0);
            y0 = y0.min(c.rect.y0);
            x1 = x1.max(c.rect.x1);
            y1 = y1.max(c.rect.y1);
            area += c.area;
            value += c.value;
        }
        let rect = Rect::new(x0, y0, x1, y1)?;
        if (rect.area() - area).abs() > 1e-12 * rect.area() {
            return Err(Error::invalid("cells do not tile a rectangle"));
        }
        self.unions.push(FieldUnion {
            rect,
            parts: parts.to_vec(),
            value,
        });
        Ok(self.unions.last().expect("just pushed"))
    }
}

/// `cfg.n_paths` independent realisations of the subordinated basis.
///
/// On each cell `A` the clock value `T(A)` is drawn from the cell's pair over
/// control mass `c·|A|`, then `L_T(A) ~ μ_L^{T(A)}`. Replicate `r`, cell `i`
/// uses stream `r`, step `i`.
pub fn sample_basis_grid(mu_l: &LevyTriplet, field: &SeedField, cfg: &SimConfig) -> Result<Vec<GridField>> {
    cfg.validate()?;
    let clocks = field
        .cells()
        .iter()
        .map(|c| SubordinatorSampler::new(&c.pair, cfg, c.control()))
        .collect::<Result<Vec<_>>>()?;
    let base = LevySampler::new(mu_l, cfg, 1.0)?;
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|r| {
            let cells = field
                .cells()
                .iter()
                .zip(&clocks)
                .enumerate()
                .map(|(i, (c, clock))| {
                    let mut rng = substream(cfg.seed, r, i as u64);
                    let t = clock.sample(c.control(), &mut rng)?;
                    let value = base.sample(t, &mut rng)?;
                    Ok(FieldCell {
                        rect: c.rect,
                        area: c.rect.area(),
                        value,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(GridField {
                cells,
                unions: Vec::new(),
                seed: cfg.seed,
                replicate: r,
            })
        })
        .collect()
}
