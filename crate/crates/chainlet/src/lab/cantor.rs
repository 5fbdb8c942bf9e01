use crate::chains::{Cell, PolyChain};
use crate::error::{Error, Result};

/// Largest supported Cantor depth.
pub const MAX_CANTOR_DEPTH: usize = 20;

/// `C_k` with its segments as exact numerators over `3^k`.
#[derive(Clone, Debug)]
pub struct Cantor {
    pub k: usize,
    /// Left endpoints `a` of the segments `[a, a+1] / 3^k`, increasing.
    pub numerators: Vec<u64>,
    pub denominator: u64,
    pub chain: PolyChain,
    pub boundary: PolyChain,
}

impl Cantor {
    /// `∫_{∂C_k} x` in exact arithmetic, as `(numerator, denominator)`.
    pub fn exact_boundary_integral(&self) -> (u64, u64) {
        let total: u64 = self.numerators.iter().map(|&a| (a + 1) - a).sum();
        (total, self.denominator)
    }
}

/// `C_k = I − Σ I_k`: the `2^k` middle-third survivors of `[0, 1]`, and `∂C_k`.
pub fn build_cantor(k: usize) -> Result<Cantor> {
    if k > MAX_CANTOR_DEPTH {
        return Err(Error::Invalid(format!("Cantor depth {k} exceeds {MAX_CANTOR_DEPTH}")));
    }
    let mut nums = vec![0u64];
    for _ in 0..k {
        nums = nums.iter().flat_map(|&a| [3 * a, 3 * a + 2]).collect();
    }
    let denominator = 3u64.pow(k as u32);
    let d = denominator as f64;
    let seg = |a: u64| Cell::Simplex { pts: vec![vec![a as f64 / d], vec![(a + 1) as f64 / d]] };
    let chain = PolyChain::new(1, 1, nums.iter().map(|&a| (1.0, seg(a))))?;
    let boundary = chain.boundary();
    Ok(Cantor { k, numerators: nums, denominator, chain, boundary })
}
