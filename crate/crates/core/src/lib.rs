//! Exact closed forms of ζ, η and λ at even arguments, obtained by
//! computing energy moments of polynomial states in an infinite square
//! well twice: as direct quadratic forms and as sums over the spectrum.

pub mod cli;
pub mod decimal;
pub mod deriver;
pub mod exactalg;
pub mod numeric;
pub mod poly;
pub mod polybox;
pub mod spectral;

pub use exactalg::{solve_exact, LinearForm, PiScaled, Rational, Solution, SumKind, SumSymbol};
pub use polybox::{BoxPolynomial, ShiftedParity};
pub use spectral::{moment_series, sine_coefficients, weight_form, SineCoefficientForm, WeightForm};
