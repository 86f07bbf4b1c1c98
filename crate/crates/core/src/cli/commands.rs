use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{num, Format, Resolved};
use crate::coupling::{self, LinewidthConvention};
use crate::dressed::DressedSystem;
use crate::dynamics::{self, IntensityTrace, TraceMode};
use crate::error::{Error, Result};
use crate::rates::{self, BranchName, CascadeChain, TransitionTable};
use crate::spectrum::{self, QUOTED_SHIFT_HZ};

const INTEGRAL_T_MAX: f64 = 200.0;

fn metadata(r: &Resolved) -> Result<Value> {
    let s = &r.scenario;
    let beta = coupling::beta(s)?;
    let two_beta_hz = 2.0 * beta.value.abs() / (2.0 * std::f64::consts::PI);
    Ok(json!({
        "kr": s.kr(),
        "wavenumber_per_m": s.wavenumber,
        "omega_rad_s": s.omega,
        "linewidth_per_s": s.linewidth()?,
        "dipole_Cm": s.dipole()?,
        "beta_rad_s": beta.value,
        "far_field_warning": beta.far_field_warning,
        "atoms": r.spec.atom_counts(),
        "phases": r.spec.samples().iter().map(|x| x.phase).collect::<Vec<_>>(),
        "linewidth_convention": match s.linewidth_convention {
            LinewidthConvention::Angular => "angular: Gamma0 = d^2 omega^3 / (3 pi eps0 hbar c^3)",
            LinewidthConvention::Cyclic => "cyclic: linewidth given in Hz, multiplied by 2 pi",
        },
        "assumptions": [
            "scalar far-field coupling alpha = k^2 cos(kr) / (4 pi eps0 r); dipole angular factor not modeled",
            "all emission along the sample axis; rates in units of the single-atom linewidth",
            "each photon carries energy hbar*omega; dressed shifts neglected in intensity",
        ],
        "quoted_shift_note": format!(
            "2*beta at this kr is {two_beta_hz:.4e} Hz; the commonly quoted value is {QUOTED_SHIFT_HZ:.0} Hz"
        ),
    }))
}

fn render_json(r: &Resolved, key: &str, rows: Value) -> Result<String> {
    let doc = json!({ "metadata": metadata(r)?, key: rows });
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Contract(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let io = |e: csv::Error| Error::Contract(e.to_string());
    w.write_record(header.split(',')).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Contract(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Contract(e.to_string()))
}

fn solve(r: &Resolved) -> Result<(DressedSystem, TransitionTable)> {
    let system = DressedSystem::solve(&r.spec, &r.scenario)?;
    let table = rates::transition_rates(&system);
    Ok((system, table))
}

pub fn cmd_dressed(r: &Resolved) -> Result<String> {
    let system = DressedSystem::solve(&r.spec, &r.scenario)?;
    let spec = &system.spec;
    match r.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for sector in &system.sectors {
                for st in &sector.states {
                    for (ket, a) in sector.kets.iter().zip(st.amplitudes.iter()) {
                        rows.push(vec![
                            sector.sector.to_string(),
                            system.name(st.id),
                            num(st.shift),
                            num(system.shift_angular(st.id)),
                            st.label.symbol().to_string(),
                            symmetry_name(st.symmetry),
                            ket.label(spec),
                            num(a.re),
                            num(a.im),
                        ]);
                    }
                }
            }
            Ok(csv(
                "sector,state,shift_over_hbeta,shift_rad_s,label,symmetry,ket,amp_re,amp_im",
                rows,
            )?)
        }
        Format::Json => {
            let states: Vec<Value> = system
                .sectors
                .iter()
                .flat_map(|sector| {
                    let system = &system;
                    sector.states.iter().map(move |st| {
                        json!({
                            "sector": sector.sector,
                            "state": system.name(st.id),
                            "shift_over_hbeta": st.shift,
                            "shift_rad_s": system.shift_angular(st.id),
                            "label": st.label.symbol(),
                            "symmetry": st.symmetry,
                            "amplitudes": sector.kets.iter().zip(st.amplitudes.iter()).map(|(k, a)| json!({
                                "ket": k.label(spec),
                                "re": a.re,
                                "im": a.im,
                            })).collect::<Vec<_>>(),
                        })
                    })
                })
                .collect();
            render_json(r, "states", Value::Array(states))
        }
    }
}

fn symmetry_name(s: crate::dressed::Symmetry) -> String {
    match serde_json::to_value(s) {
        Ok(Value::String(x)) => x,
        _ => String::new(),
    }
}

pub fn cmd_rates(r: &Resolved, include_forbidden: bool) -> Result<String> {
    let (system, table) = solve(r)?;
    let entries: Vec<_> = table
        .entries
        .iter()
        .filter(|t| include_forbidden || t.allowed())
        .collect();
    match r.format {
        Format::Csv => Ok(csv(
            "from,to,rate_over_Gamma,rate_over_two_atom,offset_over_beta",
            entries.iter().map(|t| {
                vec![
                    system.name(t.from),
                    system.name(t.to),
                    num(t.rate),
                    num(t.rate_over_two_atom()),
                    num(t.offset),
                ]
            }),
        )?),
        Format::Json => {
            let rows = entries
                .iter()
                .map(|t| {
                    json!({
                        "from": system.name(t.from),
                        "to": system.name(t.to),
                        "rate_over_Gamma": t.rate,
                        "rate_over_two_atom": t.rate_over_two_atom(),
                        "offset_over_beta": t.offset,
                        "allowed": t.allowed(),
                    })
                })
                .collect();
            render_json(r, "transitions", Value::Array(rows))
        }
    }
}

fn count_word(n: u32) -> String {
    const WORDS: [&str; 13] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve",
    ];
    WORDS
        .get(n as usize)
        .map_or_else(|| n.to_string(), |w| w.to_string())
}

/// Named curves for the configured compound sample.
fn chain_curves(r: &Resolved, t_max: f64) -> Result<Vec<(String, IntensityTrace)>> {
    let (system, table) = solve(r)?;
    let branches = rates::extract_branches(&table, &system)?;
    let scale = r.rate_normalization.factor();
    let mut out = Vec::new();
    for name in [BranchName::Main, BranchName::Secondary] {
        if let Some(b) = branches.iter().find(|b| b.name == name) {
            out.push((
                format!("I_{name}"),
                dynamics::chain_trace(&b.scaled(scale), t_max, r.dt_out)?,
            ));
        }
    }
    let mut nonint: Option<IntensityTrace> = None;
    for m in r.spec.atom_counts() {
        let t = dynamics::chain_trace(
            &CascadeChain::dicke_ladder(m).scaled(scale),
            t_max,
            r.dt_out,
        )?;
        nonint = Some(match nonint {
            None => t,
            Some(acc) => acc.plus(&t, "non-interacting"),
        });
    }
    if let Some(t) = nonint {
        out.push(("I_nonint".into(), t));
    }
    let n = r.spec.total_atoms();
    out.push((
        format!("I_{}atom", count_word(n)),
        dynamics::chain_trace(
            &CascadeChain::dicke_ladder(n).scaled(scale),
            t_max,
            r.dt_out,
        )?,
    ));
    Ok(out)
}

fn network_curves(r: &Resolved, t_max: f64) -> Result<(Vec<String>, IntensityTrace)> {
    let (system, table) = solve(r)?;
    let scale = r.rate_normalization.factor();
    let mut table = table;
    for t in &mut table.entries {
        t.rate *= scale;
    }
    let states: Vec<_> = system.states().map(|s| s.id).collect();
    let pops = dynamics::evolve_network(&table, &states, system.top(), t_max, r.dt_out)?;
    let names = states.iter().map(|&id| system.name(id)).collect();
    Ok((names, dynamics::network_intensity(&table, &pops)))
}

pub fn cmd_intensity(r: &Resolved, integral_check: bool) -> Result<String> {
    let t_max = if integral_check {
        INTEGRAL_T_MAX.max(r.t_max)
    } else {
        r.t_max
    };
    let expected = r.spec.total_atoms() as f64;
    let (columns, traces, pop_names): (Vec<String>, Vec<IntensityTrace>, Vec<String>) = match r.mode
    {
        TraceMode::Chain => {
            let curves = chain_curves(r, t_max)?;
            let (names, traces) = curves.into_iter().unzip();
            (names, traces, Vec::new())
        }
        TraceMode::Network => {
            let (names, trace) = network_curves(r, t_max)?;
            (vec!["I_network".into()], vec![trace], names)
        }
    };

    if integral_check {
        let rows: Vec<(String, f64)> = columns
            .iter()
            .zip(&traces)
            .map(|(c, t)| (c.clone(), t.integral()))
            .collect();
        return match r.format {
            Format::Csv => Ok(csv(
                "curve,integral_over_hbar_omega,expected,abs_error",
                rows.iter().map(|(c, v)| {
                    vec![c.clone(), num(*v), num(expected), num((v - expected).abs())]
                }),
            )?),
            Format::Json => render_json(
                r,
                "integrals",
                Value::Array(
                    rows.iter()
                        .map(|(c, v)| json!({"curve": c, "integral_over_hbar_omega": v, "expected": expected}))
                        .collect(),
                ),
            ),
        };
    }

    let times = &traces[0].times;
    match r.format {
        Format::Csv => {
            let mut header = String::from("t_over_tausp");
            for c in &columns {
                let _ = write!(header, ",{c}");
            }
            for p in &pop_names {
                let _ = write!(header, ",P_{p}");
            }
            let rows = (0..times.len()).map(|k| {
                let mut row = vec![num(times[k])];
                row.extend(traces.iter().map(|t| num(t.intensity[k])));
                if r.mode == TraceMode::Network {
                    row.extend(traces[0].populations.values.iter().map(|v| num(v[k])));
                }
                row
            });
            Ok(csv(&header, rows)?)
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("t_over_tausp".into(), json!(times));
            for (c, t) in columns.iter().zip(&traces) {
                obj.insert(c.clone(), json!(t.intensity));
            }
            if r.mode == TraceMode::Network {
                for (p, v) in pop_names.iter().zip(&traces[0].populations.values) {
                    obj.insert(format!("P_{p}"), json!(v));
                }
            }
            render_json(r, "traces", Value::Object(obj))
        }
    }
}

pub fn cmd_chirp(r: &Resolved) -> Result<String> {
    let (system, table) = solve(r)?;
    let branches = rates::extract_branches(&table, &system)?;
    let beta = system.beta_ref;
    let schedules: Vec<_> = branches
        .iter()
        .map(|b| spectrum::chirp_schedule(b, &system).with_carrier(r.scenario.omega, beta))
        .collect();
    match r.format {
        Format::Csv => {
            let mut rows = Vec::new();
            for s in &schedules {
                for st in &s.steps {
                    rows.push(vec![
                        s.branch.to_string(),
                        st.step.to_string(),
                        system.name(st.from),
                        system.name(st.to),
                        num(st.offset),
                        num(st.offset * beta),
                        num(st.omega.unwrap_or(f64::NAN)),
                    ]);
                }
            }
            Ok(csv(
                "branch,step,from,to,offset_over_beta,offset_rad_s,photon_omega_rad_s",
                rows,
            )?)
        }
        Format::Json => {
            let rows = schedules
                .iter()
                .flat_map(|s| {
                    let system = &system;
                    s.steps.iter().map(move |st| {
                        json!({
                            "branch": s.branch,
                            "step": st.step,
                            "from": system.name(st.from),
                            "to": system.name(st.to),
                            "offset_over_beta": st.offset,
                            "offset_rad_s": st.offset * beta,
                            "photon_omega_rad_s": st.omega,
                        })
                    })
                })
                .collect();
            render_json(r, "steps", Value::Array(rows))
        }
    }
}

pub fn cmd_sweep(r: &Resolved) -> Result<String> {
    let rows =
        spectrum::ba_scenario_sweep(&r.scenario, r.n_samples, r.kr_min, r.kr_max, r.kr_steps)?;
    match r.format {
        Format::Csv => Ok(csv(
            "kr,beta_rad_s,excursion_rad_s,excursion_Hz,fig7_units",
            rows.iter().map(|x| {
                vec![
                    num(x.kr),
                    num(x.beta_rad_s),
                    num(x.excursion_rad_s),
                    num(x.excursion_hz),
                    num(x.fig7_units),
                ]
            }),
        )?),
        Format::Json => render_json(r, "sweep", json!(rows)),
    }
}
