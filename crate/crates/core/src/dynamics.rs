//! Cascade populations and radiated intensity.
//!
//! A single chain is solved in closed form: the Laplace transform of
//! P_j is Π_{i<j} γ_i / Π_{i≤j}(s + γ_i), inverted by partial fractions with
//! confluent t^k e^{−γt} terms for repeated rates. The full transition network
//! is propagated with the exact one-step matrix exponential of its generator.
//!
//! Time is in τ_sp = 1/Γ, intensity in I₀ = ħωΓ.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::CompoundSpec;
use crate::coupling::PhysicalScenario;
use crate::dressed::{DressedSystem, StateId};
use crate::error::{domain, Result};
use crate::rates::{self, BranchName, CascadeChain, TransitionTable};

/// Rates closer than this (units of Γ) are treated as repeated.
pub const RATE_TIE_TOL: f64 = 1e-9;

pub const DEFAULT_T_MAX: f64 = 10.0;
pub const DEFAULT_DT_OUT: f64 = 0.01;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceMode {
    #[default]
    Chain,
    Network,
}

/// Output grid `0, dt, 2dt, …` up to `t_max`, with `t_max` itself appended
/// when it is not on the grid.
pub fn time_grid(t_max: f64, dt_out: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return domain(format!("t_max must be positive, got {t_max}"));
    }
    if !(dt_out > 0.0 && dt_out.is_finite()) {
        return domain(format!("dt_out must be positive, got {dt_out}"));
    }
    let n = (t_max / dt_out + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * dt_out).collect();
    if t_max - grid[n] > 1e-9 * dt_out {
        grid.push(t_max);
    }
    Ok(grid)
}

/// Population of every state of a cascade on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Populations {
    pub times: Vec<f64>,
    pub states: Vec<StateId>,
    /// `values[state][time]`.
    pub values: Vec<Vec<f64>>,
}

impl Populations {
    pub fn total_at(&self, k: usize) -> f64 {
        self.values.iter().map(|v| v[k]).sum()
    }
}

/// One term c · t^power · e^{−rate t}.
#[derive(Clone, Copy, Debug)]
struct ExpTerm {
    coeff: f64,
    power: u32,
    rate: f64,
}

/// Cluster rates (within [`RATE_TIE_TOL`]) into (representative, multiplicity).
fn group_rates(rates: &[f64]) -> Vec<(f64, u32)> {
    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups: Vec<(f64, u32, f64)> = Vec::new(); // (sum, count, last)
    for r in sorted {
        match groups.last_mut() {
            Some((sum, count, last)) if r - *last < RATE_TIE_TOL => {
                *sum += r;
                *count += 1;
                *last = r;
            }
            _ => groups.push((r, 1, r)),
        }
    }
    groups
        .into_iter()
        .map(|(sum, count, _)| (sum / f64::from(count), count))
        .collect()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Inverse Laplace transform of 1 / Π_i (s + rates_i).
fn inverse_laplace(rates: &[f64]) -> Vec<ExpTerm> {
    let groups = group_rates(rates);
    let mut terms = Vec::new();
    for (g, &(lam, mult)) in groups.iter().enumerate() {
        let order = mult as usize;
        // Taylor series in u = s + lam of Π_{h≠g} (u + (lam_h − lam))^{−m_h}.
        let mut series = vec![0.0; order];
        series[0] = 1.0;
        for (h, &(lam_h, m_h)) in groups.iter().enumerate() {
            if h == g {
                continue;
            }
            let delta = lam_h - lam;
            let factor: Vec<f64> = (0..order as u32)
                .map(|n| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binomial(m_h + n - 1, n) * delta.powi(-(m_h as i32) - n as i32)
                })
                .collect();
            let mut next = vec![0.0; order];
            for (i, a) in series.iter().enumerate() {
                for (j, b) in factor.iter().enumerate().take(order - i) {
                    next[i + j] += a * b;
                }
            }
            series = next;
        }
        // 1/(s+lam)^k ↔ t^{k−1} e^{−lam t} / (k−1)!
        let mut factorial = 1.0;
        for k in 1..=order {
            if k > 1 {
                factorial *= (k - 1) as f64;
            }
            terms.push(ExpTerm {
                coeff: series[order - k] / factorial,
                power: (k - 1) as u32,
                rate: lam,
            });
        }
    }
    terms
}

/// Closed-form solution of dP₀/dt = −γ₁P₀, dP_j/dt = γ_j P_{j−1} − γ_{j+1} P_j
/// with the last state absorbing and P₀(0) = 1.
#[derive(Clone, Debug)]
pub struct ChainSolution {
    /// Terms of every non-absorbing state.
    terms: Vec<Vec<ExpTerm>>,
}

impl ChainSolution {
    pub fn new(rates: &[f64]) -> Result<Self> {
        if let Some(r) = rates.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return domain(format!("chain rates must be positive, got {r}"));
        }
        let terms = (0..rates.len())
            .map(|j| {
                let prefactor: f64 = rates[..j].iter().product();
                inverse_laplace(&rates[..=j])
                    .into_iter()
                    .map(|t| ExpTerm {
                        coeff: t.coeff * prefactor,
                        ..t
                    })
                    .collect()
            })
            .collect();
        Ok(ChainSolution { terms })
    }

    /// Populations of all `rates.len() + 1` states at time `t`.
    pub fn at(&self, t: f64) -> Vec<f64> {
        let mut p: Vec<f64> = self
            .terms
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|e| e.coeff * t.powi(e.power as i32) * (-e.rate * t).exp())
                    .sum::<f64>()
            })
            .collect();
        let absorbed = 1.0 - p.iter().sum::<f64>();
        p.push(absorbed.max(0.0));
        p
    }
}

pub fn evolve_chain(chain: &CascadeChain, t_max: f64, dt_out: f64) -> Result<Populations> {
    let times = time_grid(t_max, dt_out)?;
    let sol = ChainSolution::new(&chain.rates)?;
    let n = chain.states.len();
    let mut values = vec![Vec::with_capacity(times.len()); n];
    for &t in &times {
        for (j, p) in sol.at(t).into_iter().enumerate() {
            values[j].push(p);
        }
    }
    Ok(Populations {
        times,
        states: chain.states.clone(),
        values,
    })
}

/// Time-domain intensity of one cascade or network.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityTrace {
    pub name: String,
    pub mode: TraceMode,
    pub times: Vec<f64>,
    /// I(t) in units of I₀.
    pub intensity: Vec<f64>,
    pub populations: Populations,
}

impl IntensityTrace {
    pub fn peak(&self) -> f64 {
        self.intensity
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// ∫I dt in units of ħω (trapezoid rule on the output grid).
    pub fn integral(&self) -> f64 {
        trapezoid(&self.times, &self.intensity)
    }

    /// Pointwise sum with another trace on the same grid.
    pub fn plus(&self, other: &IntensityTrace, name: impl Into<String>) -> IntensityTrace {
        IntensityTrace {
            name: name.into(),
            intensity: self
                .intensity
                .iter()
                .zip(&other.intensity)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// I(t) = Σ_j γ_{j→j+1} P_j(t), every photon booked at ħω.
pub fn intensity(chain: &CascadeChain, populations: &Populations) -> IntensityTrace {
    let intensity = (0..populations.times.len())
        .map(|k| {
            chain
                .rates
                .iter()
                .zip(&populations.values)
                .map(|(g, p)| g * p[k])
                .sum()
        })
        .collect();
    IntensityTrace {
        name: chain.name.to_string(),
        mode: TraceMode::Chain,
        times: populations.times.clone(),
        intensity,
        populations: populations.clone(),
    }
}

pub fn chain_trace(chain: &CascadeChain, t_max: f64, dt_out: f64) -> Result<IntensityTrace> {
    Ok(intensity(chain, &evolve_chain(chain, t_max, dt_out)?))
}

/// Rate-equation propagation over every allowed transition, starting in
/// `initial`.
pub fn evolve_network(
    table: &TransitionTable,
    states: &[StateId],
    initial: StateId,
    t_max: f64,
    dt_out: f64,
) -> Result<Populations> {
    let times = time_grid(t_max, dt_out)?;
    let n = states.len();
    let index = |id: StateId| states.iter().position(|&s| s == id);
    let Some(start) = index(initial) else {
        return domain(format!("initial state {initial} is not in the network"));
    };

    let mut generator = DMatrix::<f64>::zeros(n, n);
    for t in table.allowed() {
        if let (Some(f), Some(to)) = (index(t.from), index(t.to)) {
            generator[(to, f)] += t.rate;
            generator[(f, f)] -= t.rate;
        }
    }

    let mut p = DVector::<f64>::zeros(n);
    p[start] = 1.0;
    let mut values = vec![Vec::with_capacity(times.len()); n];
    let step = (&generator * dt_out).exp();
    let mut prev_t = 0.0;
    for &t in &times {
        let dt = t - prev_t;
        if dt > 0.0 {
            if (dt - dt_out).abs() <= 1e-9 * dt_out {
                p = &step * p;
            } else {
                p = (&generator * dt).exp() * p;
            }
        }
        prev_t = t;
        for (j, v) in values.iter_mut().enumerate() {
            v.push(p[j]);
        }
    }
    Ok(Populations {
        times,
        states: states.to_vec(),
        values,
    })
}

/// Intensity of a network run, Σ_i (Σ_out γ) P_i.
pub fn network_intensity(table: &TransitionTable, populations: &Populations) -> IntensityTrace {
    let out: Vec<f64> = populations
        .states
        .iter()
        .map(|&s| table.total_out(s))
        .collect();
    let intensity = (0..populations.times.len())
        .map(|k| {
            out.iter()
                .zip(&populations.values)
                .map(|(g, p)| g * p[k])
                .sum()
        })
        .collect();
    IntensityTrace {
        name: "network".into(),
        mode: TraceMode::Network,
        times: populations.times.clone(),
        intensity,
        populations: populations.clone(),
    }
}

/// The four curves of the two-sample comparison.
#[derive(Clone, Debug)]
pub struct ComparisonTraces {
    pub main: IntensityTrace,
    pub secondary: IntensityTrace,
    /// Two independent two-atom samples (twice one sample's intensity).
    pub non_interacting: IntensityTrace,
    /// One four-atom sample.
    pub four_atom: IntensityTrace,
}

impl ComparisonTraces {
    pub fn all(&self) -> [&IntensityTrace; 4] {
        [
            &self.main,
            &self.secondary,
            &self.non_interacting,
            &self.four_atom,
        ]
    }
}

/// Branch chains of two interacting two-atom samples. Rates do not depend on
/// the separation, so any generic kr serves.
pub fn paper_branches() -> Result<(DressedSystem, Vec<CascadeChain>)> {
    let kr = 25.0;
    let spec = CompoundSpec::two_samples(2, kr)?;
    let system = DressedSystem::solve(&spec, &PhysicalScenario::reduced(1.0, kr))?;
    let table = rates::transition_rates(&system);
    let branches = rates::extract_branches(&table, &system)?;
    Ok((system, branches))
}

fn named(branches: &[CascadeChain], name: BranchName) -> Result<&CascadeChain> {
    branches
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| crate::Error::Contract(format!("no {name} branch")))
}

pub fn comparison_traces(t_max: f64, dt_out: f64) -> Result<ComparisonTraces> {
    let (_, branches) = paper_branches()?;
    comparison_traces_from(&branches, 1.0, t_max, dt_out)
}

/// Comparison curves with every rate multiplied by `rate_scale` (1 for rates
/// in Γ, 1/2 for rates relative to a two-atom sample).
pub fn comparison_traces_from(
    branches: &[CascadeChain],
    rate_scale: f64,
    t_max: f64,
    dt_out: f64,
) -> Result<ComparisonTraces> {
    let main = chain_trace(
        &named(branches, BranchName::Main)?.scaled(rate_scale),
        t_max,
        dt_out,
    )?;
    let secondary = chain_trace(
        &named(branches, BranchName::Secondary)?.scaled(rate_scale),
        t_max,
        dt_out,
    )?;
    let two = chain_trace(
        &CascadeChain::dicke_ladder(2).scaled(rate_scale),
        t_max,
        dt_out,
    )?;
    let non_interacting = two.plus(&two, "non-interacting");
    let mut four_atom = chain_trace(
        &CascadeChain::dicke_ladder(4).scaled(rate_scale),
        t_max,
        dt_out,
    )?;
    four_atom.name = "four-atom".into();
    Ok(ComparisonTraces {
        main,
        secondary,
        non_interacting,
        four_atom,
    })
}
