//! Integer arithmetic substrate: factorization, primality, modular
//! inverses, CRT, discrete logarithms and prime sieves.

mod factor;
mod modular;
mod sieve;

pub use factor::{factorize, is_prime, Factorization};
pub(crate) use factor::factor_into;
pub use modular::{
    crt_solve, crt_solve_big, discrete_log, gcd, mod_inverse, mod_inverse_big,
    multiplicative_order, pow_mod, primitive_root, totient, valuation, Congruence,
};
pub use sieve::{primes_in, primes_up_to, PRIME_BUDGET};

/// Largest argument accepted by the machine-word routines.
pub const ARG_MAX: u64 = 1 << 63;

pub type Rational = num_rational::Ratio<i128>;
