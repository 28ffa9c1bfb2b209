use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::FunkError;
use crate::Vector;

/// Exponent tuple `α = (α_1, …, α_n)` of a partial derivative or monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `α = e_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α|`.
    pub fn order(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// `α! = α_1! ⋯ α_n!` in exact integer arithmetic.
    pub fn factorial(&self) -> u128 {
        self.0
            .iter()
            .map(|&a| (1..=a as u128).product::<u128>())
            .product()
    }

    /// `x^α`.
    pub fn monomial(&self, x: &Vector) -> f64 {
        self.0
            .iter()
            .zip(x.iter())
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }

    /// All indices in `n` variables with `|α| ≤ max_order`, graded, and
    /// lexicographically descending within each degree:
    /// `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), …`.
    pub fn graded_lex(n: usize, max_order: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for degree in 0..=max_order {
            let mut current = vec![0u32; n];
            fill(&mut current, 0, degree as u32, &mut out);
        }
        out
    }
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill(current, pos + 1, remaining - a, out);
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MultiIndex {
    type Err = FunkError;

    /// Parses `"2,0,1"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| FunkError::Config(format!("bad multi-index entry `{t}` in `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MultiIndex)
    }
}
