use std::sync::{Arc, OnceLock};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::{Expr, Func, Rational};
use crate::error::{Error, Result};

/// Zero-test sampling parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampling {
    pub seed: u64,
    pub samples: usize,
    pub eps_abs: f64,
    pub eps_rel: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { seed: 0, samples: 32, eps_abs: 1e-9, eps_rel: 1e-9 }
    }
}

/// A coordinate chart: ordered coordinate names and a closed sample box.
#[derive(Debug)]
pub struct Chart {
    names: Vec<Arc<str>>,
    bounds: Vec<(Rational, Rational)>,
    sampling: Sampling,
    points: OnceLock<Vec<Vec<f64>>>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S], bounds: Vec<(Rational, Rational)>) -> Result<Chart> {
        Chart::with_sampling(names, bounds, Sampling::default())
    }

    pub fn with_sampling<S: AsRef<str>>(
        names: &[S],
        bounds: Vec<(Rational, Rational)>,
        sampling: Sampling,
    ) -> Result<Chart> {
        if names.len() != bounds.len() {
            return Err(Error::Chart(format!("{} coordinates but {} intervals", names.len(), bounds.len())));
        }
        let mut seen = std::collections::BTreeSet::new();
        for n in names {
            let n = n.as_ref();
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Chart(format!("invalid coordinate name `{}`", n)));
            }
            if Func::from_name(n).is_some() {
                return Err(Error::Chart(format!("coordinate name `{}` collides with a function", n)));
            }
            if !seen.insert(n.to_string()) {
                return Err(Error::Chart(format!("duplicate coordinate `{}`", n)));
            }
        }
        for (k, (lo, hi)) in bounds.iter().enumerate() {
            if lo > hi {
                return Err(Error::Chart(format!("empty interval for coordinate {}", k)));
            }
        }
        if sampling.samples == 0 {
            return Err(Error::Chart("sample count must be positive".into()));
        }
        Ok(Chart {
            names: names.iter().map(|n| Arc::from(n.as_ref())).collect(),
            bounds,
            sampling,
            points: OnceLock::new(),
        })
    }

    /// Same coordinates and box with different sampling parameters.
    pub fn resampled(&self, sampling: Sampling) -> Chart {
        Chart { names: self.names.clone(), bounds: self.bounds.clone(), sampling, points: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn coord_names(&self) -> &[Arc<str>] {
        &self.names
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn coord(&self, index: usize) -> Expr {
        Expr::var(index, &self.names[index])
    }

    pub fn coords(&self) -> Vec<Expr> {
        (0..self.dim()).map(|i| self.coord(i)).collect()
    }

    pub fn bounds(&self) -> &[(Rational, Rational)] {
        &self.bounds
    }

    pub fn bounds_f64(&self) -> Vec<(f64, f64)> {
        self.bounds
            .iter()
            .map(|(a, b)| (a.to_f64().unwrap_or(f64::NAN), b.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    pub fn sampling(&self) -> &Sampling {
        &self.sampling
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.bounds_f64().iter().zip(p).all(|(&(lo, hi), &x)| lo <= x && x <= hi)
    }

    /// Seeded uniform sample points in the box; identical for every call.
    pub fn sample_points(&self) -> &[Vec<f64>] {
        self.points.get_or_init(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.sampling.seed);
            let b = self.bounds_f64();
            (0..self.sampling.samples)
                .map(|_| b.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo }).collect())
                .collect()
        })
    }
}
