//! Flat design-vector layout.
//!
//! The vector starts with one capacity fraction per producer, followed by one
//! block per period holding the consumer valve settings, the producer inflows
//! and the supply temperatures of the temperature-controlled producers:
//!
//! ```text
//! [ φ (n_prod) | α_0 (n_con) γ_0 (n_prod) τ_0 (n_temp) | α_1 ... ]
//! ```
//!
//! Per-period model code works on a *local* slice `[φ | α_t | γ_t | τ_t]`.

use crate::error::{Error, Result};
use crate::network::NetworkGraph;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Dimensions of the design vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignLayout {
    pub n_producers: usize,
    pub n_consumers: usize,
    /// Producers with a supply-temperature variable.
    pub n_temp: usize,
    pub n_periods: usize,
}

/// Which class a design entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarClass {
    Phi,
    Alpha,
    Gamma,
    Tau,
}

impl VarClass {
    pub fn name(self) -> &'static str {
        match self {
            VarClass::Phi => "phi",
            VarClass::Alpha => "alpha",
            VarClass::Gamma => "gamma",
            VarClass::Tau => "tau",
        }
    }
}

impl DesignLayout {
    pub fn new(n_producers: usize, n_consumers: usize, n_temp: usize, n_periods: usize) -> Result<Self> {
        if n_periods == 0 {
            return Err(Error::ShapeMismatch("design needs at least one period".into()));
        }
        if n_temp > n_producers {
            return Err(Error::ShapeMismatch(format!(
                "{n_temp} temperature-controlled producers but only {n_producers} producers"
            )));
        }
        Ok(Self { n_producers, n_consumers, n_temp, n_periods })
    }

    pub fn for_graph(graph: &NetworkGraph, n_periods: usize) -> Result<Self> {
        Self::new(graph.n_producers(), graph.n_consumers(), graph.n_temp_controlled(), n_periods)
    }

    /// Length of one per-period block.
    pub fn block_len(&self) -> usize {
        self.n_consumers + self.n_producers + self.n_temp
    }

    pub fn len(&self) -> usize {
        self.n_producers + self.n_periods * self.block_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length of a local slice `[φ | α_t | γ_t | τ_t]`.
    pub fn local_len(&self) -> usize {
        self.n_producers + self.block_len()
    }

    pub fn phi_range(&self) -> Range<usize> {
        0..self.n_producers
    }

    fn block_start(&self, t: usize) -> usize {
        self.n_producers + t * self.block_len()
    }

    pub fn alpha_range(&self, t: usize) -> Range<usize> {
        let s = self.block_start(t);
        s..s + self.n_consumers
    }

    pub fn gamma_range(&self, t: usize) -> Range<usize> {
        let s = self.block_start(t) + self.n_consumers;
        s..s + self.n_producers
    }

    pub fn tau_range(&self, t: usize) -> Range<usize> {
        let s = self.block_start(t) + self.n_consumers + self.n_producers;
        s..s + self.n_temp
    }

    // Local slice indices.
    pub fn local_phi(&self, k: usize) -> usize {
        k
    }
    pub fn local_alpha(&self, c: usize) -> usize {
        self.n_producers + c
    }
    pub fn local_gamma(&self, k: usize) -> usize {
        self.n_producers + self.n_consumers + k
    }
    pub fn local_tau(&self, j: usize) -> usize {
        2 * self.n_producers + self.n_consumers + j
    }

    /// Global index of local entry `i` of period `t`.
    pub fn global_index(&self, t: usize, i: usize) -> usize {
        if i < self.n_producers {
            i
        } else {
            self.block_start(t) + (i - self.n_producers)
        }
    }

    /// Class of global entry `i`.
    pub fn class_of(&self, i: usize) -> VarClass {
        if i < self.n_producers {
            return VarClass::Phi;
        }
        let r = (i - self.n_producers) % self.block_len();
        if r < self.n_consumers {
            VarClass::Alpha
        } else if r < self.n_consumers + self.n_producers {
            VarClass::Gamma
        } else {
            VarClass::Tau
        }
    }

    /// Period of global entry `i`, `None` for capacity fractions.
    pub fn period_of(&self, i: usize) -> Option<usize> {
        (i >= self.n_producers).then(|| (i - self.n_producers) / self.block_len())
    }

    /// Packs the four design classes into one flat vector.
    pub fn pack(&self, phi: &[f64], alpha: &[Vec<f64>], gamma: &[Vec<f64>], tau: &[Vec<f64>]) -> Result<DesignVector> {
        let check = |name: &str, got: usize, want: usize| {
            if got == want {
                Ok(())
            } else {
                Err(Error::ShapeMismatch(format!("{name}: expected {want}, got {got}")))
            }
        };
        check("phi", phi.len(), self.n_producers)?;
        check("alpha periods", alpha.len(), self.n_periods)?;
        check("gamma periods", gamma.len(), self.n_periods)?;
        check("tau periods", tau.len(), self.n_periods)?;
        let mut values = Vec::with_capacity(self.len());
        values.extend_from_slice(phi);
        for t in 0..self.n_periods {
            check("alpha", alpha[t].len(), self.n_consumers)?;
            check("gamma", gamma[t].len(), self.n_producers)?;
            check("tau", tau[t].len(), self.n_temp)?;
            values.extend_from_slice(&alpha[t]);
            values.extend_from_slice(&gamma[t]);
            values.extend_from_slice(&tau[t]);
        }
        Ok(DesignVector { layout: *self, values })
    }
}

/// Flat design vector with its layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    pub layout: DesignLayout,
    pub values: Vec<f64>,
}

/// Design split back into its classes.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignParts {
    pub phi: Vec<f64>,
    pub alpha: Vec<Vec<f64>>,
    pub gamma: Vec<Vec<f64>>,
    pub tau: Vec<Vec<f64>>,
}

/// Packs a design for `graph` over `n_periods` periods.
pub fn pack_design(
    graph: &NetworkGraph,
    n_periods: usize,
    phi: &[f64],
    alpha: &[Vec<f64>],
    gamma: &[Vec<f64>],
    tau: &[Vec<f64>],
) -> Result<DesignVector> {
    DesignLayout::for_graph(graph, n_periods)?.pack(phi, alpha, gamma, tau)
}

impl DesignVector {
    pub fn from_values(layout: DesignLayout, values: Vec<f64>) -> Result<Self> {
        if values.len() != layout.len() {
            return Err(Error::ShapeMismatch(format!(
                "design vector: expected {}, got {}",
                layout.len(),
                values.len()
            )));
        }
        Ok(Self { layout, values })
    }

    pub fn unpack(&self) -> DesignParts {
        let l = &self.layout;
        DesignParts {
            phi: self.phi().to_vec(),
            alpha: (0..l.n_periods).map(|t| self.alpha(t).to_vec()).collect(),
            gamma: (0..l.n_periods).map(|t| self.gamma(t).to_vec()).collect(),
            tau: (0..l.n_periods).map(|t| self.tau(t).to_vec()).collect(),
        }
    }

    pub fn phi(&self) -> &[f64] {
        &self.values[self.layout.phi_range()]
    }
    pub fn alpha(&self, t: usize) -> &[f64] {
        &self.values[self.layout.alpha_range(t)]
    }
    pub fn gamma(&self, t: usize) -> &[f64] {
        &self.values[self.layout.gamma_range(t)]
    }
    pub fn tau(&self, t: usize) -> &[f64] {
        &self.values[self.layout.tau_range(t)]
    }

    /// Local slice `[φ | α_t | γ_t | τ_t]` of period `t`.
    pub fn local(&self, t: usize) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.layout.local_len());
        v.extend_from_slice(self.phi());
        let s = self.layout.alpha_range(t).start;
        v.extend_from_slice(&self.values[s..s + self.layout.block_len()]);
        v
    }

    /// Copy of the design restricted to the listed periods, in that order.
    pub fn select_periods(&self, order: &[usize]) -> Result<Self> {
        let p = self.unpack();
        let layout = DesignLayout { n_periods: order.len(), ..self.layout };
        if order.is_empty() {
            return Err(Error::ShapeMismatch("empty period selection".into()));
        }
        layout.pack(
            &p.phi,
            &order.iter().map(|&t| p.alpha[t].clone()).collect::<Vec<_>>(),
            &order.iter().map(|&t| p.gamma[t].clone()).collect::<Vec<_>>(),
            &order.iter().map(|&t| p.tau[t].clone()).collect::<Vec<_>>(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_length_rule() {
        let l = DesignLayout::new(2, 3, 2, 4).unwrap();
        assert_eq!(l.len(), 30);
        let paper_scale = DesignLayout::new(3, 217, 2, 4).unwrap();
        assert_eq!(paper_scale.len(), 3 + 4 * (217 + 3 + 2));
    }

    #[test]
    fn empty_period_set_is_rejected() {
        assert!(matches!(DesignLayout::new(2, 3, 2, 0), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn wrong_slice_length_is_rejected() {
        let l = DesignLayout::new(2, 3, 2, 1).unwrap();
        let r = l.pack(&[0.5, 0.5], &[vec![1.0; 2]], &[vec![0.0; 2]], &[vec![60.0; 2]]);
        assert!(matches!(r, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn local_and_global_indices_agree() {
        let l = DesignLayout::new(3, 4, 2, 3).unwrap();
        let values: Vec<f64> = (0..l.len()).map(|i| i as f64).collect();
        let d = DesignVector::from_values(l, values).unwrap();
        for t in 0..3 {
            let local = d.local(t);
            for (i, v) in local.iter().enumerate() {
                assert_eq!(*v, l.global_index(t, i) as f64);
            }
        }
        assert_eq!(l.class_of(l.local_tau(0)), VarClass::Tau);
        assert_eq!(l.class_of(l.gamma_range(2).start), VarClass::Gamma);
        assert_eq!(l.period_of(l.alpha_range(1).start), Some(1));
    }

    proptest! {
        #[test]
        fn pack_unpack_bijection(
            np in 1usize..4, nc in 0usize..5, nt_raw in 0usize..4, nper in 1usize..5,
            seed in proptest::collection::vec(-1e3f64..1e3, 64..65),
        ) {
            let nt = nt_raw.min(np);
            let l = DesignLayout::new(np, nc, nt, nper).unwrap();
            let mut it = seed.iter().cycle().copied();
            let phi: Vec<f64> = (0..np).map(|_| it.next().unwrap()).collect();
            let mut gen = |n: usize| -> Vec<Vec<f64>> {
                (0..nper).map(|_| (0..n).map(|_| it.next().unwrap()).collect()).collect()
            };
            let alpha = gen(nc);
            let gamma = gen(np);
            let tau = gen(nt);
            let d = l.pack(&phi, &alpha, &gamma, &tau).unwrap();
            prop_assert_eq!(d.values.len(), l.len());
            let p = d.unpack();
            prop_assert_eq!(p.phi, phi);
            prop_assert_eq!(p.alpha, alpha);
            prop_assert_eq!(p.gamma, gamma);
            prop_assert_eq!(p.tau, tau);
            let again = l.pack(&d.unpack().phi, &d.unpack().alpha, &d.unpack().gamma, &d.unpack().tau).unwrap();
            prop_assert_eq!(again, d);
        }
    }
}
