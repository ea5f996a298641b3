//! The noisy two-Bell-pair family
//! `rho(t) = (1 - t)/16 I_16 + t |psi><psi|` with
//! `|psi> = (|0000> + |0011> + |1100> + |1111>)/2`, its closed-form
//! lower-bound pieces `Z1..Z4`, and sweeps comparing them with the numeric
//! bounds.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::bounds::{delta_bound, theorem1_bound, Providers, TripartiteMethod};
use crate::error::{Error, Result};
use crate::state::{CVector, DensityMatrix, PureState, SystemShape, C64};

/// Detection threshold: no bound is claimed at or below `t = 1/9`.
pub const THRESHOLD: f64 = 1.0 / 9.0;
pub const BREAK_LOW: f64 = 0.2;
pub const BREAK_HIGH: f64 = 0.308051;
/// `Z4` is only claimed for `t > 1/2`.
pub const Z4_FROM: f64 = 0.5;

pub fn psi_example() -> PureState {
    let mut v = CVector::zeros(16);
    for i in [0b0000, 0b0011, 0b1100, 0b1111] {
        v[i] = C64::new(0.5, 0.0);
    }
    PureState::new(SystemShape::qubits(4), v).expect("unit vector")
}

pub fn rho_example(t: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
    }
    let noise = DensityMatrix::maximally_mixed(SystemShape::qubits(4));
    let pure = psi_example().density();
    let m = noise.matrix().scale(1.0 - t) + pure.matrix().scale(t);
    Ok(DensityMatrix::from_parts(SystemShape::qubits(4), m))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZValues {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z4: f64,
    /// Whether `t` lies in the window `(1/2, 1]` where `Z4` applies.
    pub z4_active: bool,
}

pub fn z_formulas(t: f64) -> ZValues {
    let s17 = 17f64.sqrt();
    let z1 = (5.0 * t - 1.0).powi(2) / 128.0;
    let z2 = (1.0 - 9.0 * t).powi(2) * (1.0 + t).powi(2) / 128.0;
    let z3 = -(1.0 + t).powi(2) / 256.0 * (5.0 * (-51.0 + 4.0 * s17) * t * t + (26.0 + 4.0 * s17) * t - 3.0);
    let inner = ((1.0 + 7.0 * t) / (4.0 * (t + 1.0))).sqrt() - 3.0 * ((1.0 - t) / (4.0 * (t + 1.0))).sqrt();
    let z4 = 3.0 * (1.0 + t).powi(4) / 128.0 * inner * inner;
    ZValues {
        z1,
        z2,
        z3,
        z4,
        z4_active: t > Z4_FROM && t <= 1.0,
    }
}

/// Lower bound on the sum of `C^2_{i|j|kl}` over the six tripartitions.
pub fn z_piecewise(t: f64) -> f64 {
    let z = z_formulas(t);
    if t <= THRESHOLD || t > 1.0 {
        0.0
    } else if t <= BREAK_LOW {
        2.0 * z.z2
    } else if t <= BREAK_HIGH {
        32.0 * z.z1 + 2.0 * z.z2
    } else {
        32.0 * z.z1 + z.z2 + z.z3
    }
}

/// Closed-form squared lower bound on `C_4^2(rho(t))`:
/// `1/12 (2 Z + Z4 [t > 1/2])`.
pub fn assemble_paper_bound(t: f64) -> f64 {
    let z = z_formulas(t);
    let pair_terms = if z.z4_active { z.z4 } else { 0.0 };
    (2.0 * z_piecewise(t) + pair_terms) / 12.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExamplePoint {
    pub t: f64,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z4: f64,
    pub z_piecewise: f64,
    pub bound_sq_paper: f64,
    pub bound_sq_engine: f64,
    pub delta_sq: f64,
}

/// All columns at one `t`; the engine columns use `theorem1_bound` with the
/// best tripartite method and `delta_bound`, both with `providers`.
pub fn example_point(t: f64, providers: &Providers) -> Result<ExamplePoint> {
    let rho = rho_example(t)?;
    let z = z_formulas(t);
    Ok(ExamplePoint {
        t,
        z1: z.z1,
        z2: z.z2,
        z3: z.z3,
        z4: z.z4,
        z_piecewise: z_piecewise(t),
        bound_sq_paper: assemble_paper_bound(t),
        bound_sq_engine: theorem1_bound(&rho, TripartiteMethod::Best, providers)?.squared,
        delta_sq: delta_bound(&rho, providers)?.squared,
    })
}

/// Evenly spaced grid including both endpoints.
pub fn grid(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(0.0 <= t_min && t_min < t_max && t_max <= 1.0) || steps < 2 {
        return Err(Error::Domain(format!(
            "need 0 <= from < to <= 1 and steps >= 2, got from = {t_min}, to = {t_max}, steps = {steps}"
        )));
    }
    let h = (t_max - t_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { t_max } else { t_min + h * i as f64 })
        .collect())
}

/// Rows for every grid point, in grid order.
pub fn sweep(t_min: f64, t_max: f64, steps: usize, providers: &Providers) -> Result<Vec<ExamplePoint>> {
    let ts = grid(t_min, t_max, steps)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ts.par_iter().map(|&t| example_point(t, providers)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ts.iter().map(|&t| example_point(t, providers)).collect()
    }
}

pub const CSV_HEADER: &str = "t,z1,z2,z3,z4,z_piecewise,bound_sq_paper,bound_sq_engine,delta_sq";

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(points: &[ExamplePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in points {
        let row = [
            p.t,
            p.z1,
            p.z2,
            p.z3,
            p.z4,
            p.z_piecewise,
            p.bound_sq_paper,
            p.bound_sq_engine,
            p.delta_sq,
        ]
        .map(num);
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn sweep_to_file(
    t_min: f64,
    t_max: f64,
    steps: usize,
    providers: &Providers,
    path: &Path,
) -> Result<Vec<ExamplePoint>> {
    let points = sweep(t_min, t_max, steps, providers)?;
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_csv(&points, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(points)
}
