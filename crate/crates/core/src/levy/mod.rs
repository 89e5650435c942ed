//! Lévy measures, triplets, subordinator pairs and convolution powers.

pub mod measure;
pub mod power;
pub mod triplet;

pub use measure::{Atom, ExtendedReal, JumpLaw, LevyMeasure, MeasureClass, Support, TabulatedDensity};
pub use power::PowerLaw;
pub use triplet::{
    char_exponent, classify_measure, convert_convention, integral_one_wedge, laplace_exponent, truncated_mean,
    LawFamily, LevyTriplet, SubordinatorPair, TruncationConvention,
};
