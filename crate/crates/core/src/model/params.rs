use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::exponents::{energy_critical_exponent, Exponent};
use crate::spectral::{ComplexField, Grid};

/// Symmetric matrix of strictly positive coupling constants `a_jk`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    /// Builds from row-major entries.
    pub fn new(m: usize, entries: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("at least one component is required".into()));
        }
        if entries.len() != m * m {
            return Err(Error::Shape(format!(
                "coupling matrix for {m} components needs {} entries, got {}",
                m * m,
                entries.len()
            )));
        }
        for j in 0..m {
            for k in 0..m {
                let a = entries[j * m + k];
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::InvalidParams(format!(
                        "coupling entries must be positive, a[{j}][{k}] = {a}"
                    )));
                }
                if a != entries[k * m + j] {
                    return Err(Error::InvalidParams(format!(
                        "coupling matrix must be symmetric, a[{j}][{k}] = {a} but a[{k}][{j}] = {}",
                        entries[k * m + j]
                    )));
                }
            }
        }
        Ok(Self { m, entries })
    }

    /// Every entry equal to `a`.
    pub fn uniform(m: usize, a: f64) -> Result<Self> {
        Self::new(m, vec![a; m * m])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.m + k]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.entries[j * self.m..(j + 1) * self.m]
    }

    /// `P A P^T` for the permutation `perm` (new component `i` is old `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m)?;
        let m = self.m;
        let mut entries = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                entries[i * m + k] = self.get(perm[i], perm[k]);
            }
        }
        Ok(Self { m, entries })
    }
}

pub(crate) fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m {
        return Err(Error::Shape(format!("permutation of length {} for {m} components", perm.len())));
    }
    for &i in perm {
        if i >= m || seen[i] {
            return Err(Error::InvalidParams(format!("{perm:?} is not a permutation")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Dimension, exponent and couplings of the system
/// `i ∂_t u_j + Δu_j = Σ_k a_jk |u_k|^p |u_j|^{p-2} u_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    dim: usize,
    p: Exponent,
    coupling: CouplingMatrix,
}

impl ModelParams {
    pub fn new(dim: usize, p: Exponent, coupling: CouplingMatrix) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::InvalidParams(format!("dimension must be in 1..=4, got {dim}")));
        }
        let pf = p.to_f64();
        if !(pf.is_finite() && pf > 1.0) {
            return Err(Error::InvalidParams(format!("p must be finite and > 1, got {p}")));
        }
        let upper = energy_critical_exponent(dim);
        if p.compare(upper) == Ordering::Greater {
            return Err(Error::OutOfRange(format!(
                "p = {p} exceeds p^* = {upper} for N = {dim}"
            )));
        }
        Ok(Self { dim, p, coupling })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.coupling.m()
    }

    pub fn p(&self) -> f64 {
        self.p.to_f64()
    }

    pub fn p_exact(&self) -> Exponent {
        self.p
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self {
            dim: self.dim,
            p: self.p,
            coupling: self.coupling.permuted(perm)?,
        })
    }
}

/// The tuple `(u_1, ..., u_m)` at time `t`, all on one grid.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub time: f64,
    components: Vec<ComplexField>,
}

impl SystemState {
    pub fn new(time: f64, components: Vec<ComplexField>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::Empty("a state needs at least one component".into()))?;
        for c in &components[1..] {
            first.require_same_grid(c)?;
        }
        Ok(Self { time, components })
    }

    pub fn zeros(grid: &Arc<Grid>, m: usize) -> Self {
        Self {
            time: 0.0,
            components: (0..m).map(|_| ComplexField::zeros(grid.clone())).collect(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.components[0].grid()
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ComplexField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [ComplexField] {
        &mut self.components
    }

    pub fn component(&self, j: usize) -> Result<&ComplexField> {
        self.components.get(j).ok_or(Error::ComponentIndex {
            index: j,
            count: self.components.len(),
        })
    }

    pub fn into_components(self) -> Vec<ComplexField> {
        self.components
    }

    /// Checks that the state matches the parameters (component count and
    /// dimension).
    pub fn check_against(&self, params: &ModelParams) -> Result<()> {
        if self.m() != params.m() {
            return Err(Error::Shape(format!(
                "state has {} components but the model has {}",
                self.m(),
                params.m()
            )));
        }
        if self.grid().dim() != params.dim() {
            return Err(Error::Shape(format!(
                "state is {}-dimensional but the model has N = {}",
                self.grid().dim(),
                params.dim()
            )));
        }
        Ok(())
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m())?;
        Ok(Self {
            time: self.time,
            components: perm.iter().map(|&i| self.components[i].clone()).collect(),
        })
    }

    pub fn to_physical(&self) -> Self {
        Self {
            time: self.time,
            components: self.components.iter().map(|c| c.to_physical()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }
}
