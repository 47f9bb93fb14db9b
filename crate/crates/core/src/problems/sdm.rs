//! Single-diode model of a photovoltaic panel and the three-point datasheet
//! fitting problem built on it.
//!
//! The current at voltage `v` solves the implicit equation
//!
//! ```text
//! I = I_L - I_o (exp((v + I R_s) / a) - 1) - (v + I R_s) / R_sh
//! ```
//!
//! Its right-hand side minus `I` is strictly decreasing in `I`, so plain
//! bisection always finds the unique root once a sign change is bracketed.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimizer::Objective;
use crate::space::{make_grid, GridScale, SearchSpace};

const CURRENT_TOL: f64 = 1e-10;
const VOLTAGE_TOL: f64 = 1e-10;
const MAX_BISECTIONS: usize = 200;
const MAX_EXPANSIONS: usize = 10;
const MPP_SCAN_POINTS: usize = 2000;

/// The five model parameters: currents in A, resistances in Ω and the
/// modified ideality factor `a` in V.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdmParams {
    pub i_l: f64,
    pub i_o: f64,
    pub r_s: f64,
    pub r_sh: f64,
    pub a: f64,
}

impl SdmParams {
    /// Ground truth behind the bundled synthetic datasheet.
    pub const REFERENCE: SdmParams = SdmParams {
        i_l: 9.0,
        i_o: 3e-10,
        r_s: 0.35,
        r_sh: 800.0,
        a: 1.9,
    };

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("i_l", self.i_l, self.i_l >= 0.0),
            ("i_o", self.i_o, self.i_o > 0.0),
            ("r_s", self.r_s, self.r_s >= 0.0),
            ("r_sh", self.r_sh, self.r_sh > 0.0),
            ("a", self.a, self.a > 0.0),
        ];
        for (name, value, ok) in checks {
            if !value.is_finite() || !ok {
                return Err(Error::config(name, format!("out of range: {value}")));
            }
        }
        Ok(())
    }

    /// Parameters in search-space order `[i_l, i_o, r_s, r_sh, a]`.
    pub fn from_point(point: &[f64]) -> Self {
        Self {
            i_l: point[0],
            i_o: point[1],
            r_s: point[2],
            r_sh: point[3],
            a: point[4],
        }
    }

    pub fn to_point(&self) -> [f64; 5] {
        [self.i_l, self.i_o, self.r_s, self.r_sh, self.a]
    }
}

/// Short-circuit current, maximum power point and open-circuit voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvTargets {
    pub isc: f64,
    pub vmp: f64,
    pub imp: f64,
    pub voc: f64,
}

impl IvTargets {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("isc", self.isc),
            ("vmp", self.vmp),
            ("imp", self.imp),
            ("voc", self.voc),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(
                    name,
                    format!("must be finite and > 0 (got {v})"),
                ));
            }
        }
        if self.vmp >= self.voc {
            return Err(Error::config("vmp", "must be below voc"));
        }
        if self.imp >= self.isc {
            return Err(Error::config("imp", "must be below isc"));
        }
        Ok(())
    }
}

fn implicit_residual(p: &SdmParams, v: f64, i: f64) -> f64 {
    let vd = v + i * p.r_s;
    p.i_l - p.i_o * ((vd / p.a).exp() - 1.0) - vd / p.r_sh - i
}

/// Current delivered at terminal voltage `v`.
pub fn sdm_current(params: &SdmParams, v: f64) -> Result<f64> {
    params.validate()?;
    if !v.is_finite() {
        return Err(Error::Solver(format!("non-finite voltage {v}")));
    }
    let g = |i: f64| implicit_residual(params, v, i);
    let mut lo = -params.i_l - v.abs() / params.r_sh - 1.0;
    let mut hi = params.i_l + 1.0;
    let mut expansions = 0;
    while !(g(lo) > 0.0 && g(hi) < 0.0) {
        if expansions == MAX_EXPANSIONS {
            return Err(Error::Solver(format!(
                "no sign change for v={v} in [{lo:e}, {hi:e}] A with {params:?}"
            )));
        }
        lo *= 2.0;
        hi *= 2.0;
        expansions += 1;
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo < CURRENT_TOL || mid == lo || mid == hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root-mean-square of the three relative errors at short circuit, maximum
/// power point and open circuit, all normalized by `isc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// An inner solve failed and `value` is the `f64::MAX` sentinel.
    pub failed: bool,
}

pub fn sdm_residual(params: &SdmParams, targets: &IvTargets) -> Residual {
    let solve = || -> Result<f64> {
        let r0 = (sdm_current(params, 0.0)? - targets.isc) / targets.isc;
        let r1 = (sdm_current(params, targets.vmp)? - targets.imp) / targets.isc;
        let r2 = sdm_current(params, targets.voc)? / targets.isc;
        Ok(((r0 * r0 + r1 * r1 + r2 * r2) / 3.0).sqrt())
    };
    match solve() {
        Ok(value) if value.is_finite() => Residual {
            value,
            failed: false,
        },
        _ => Residual {
            value: f64::MAX,
            failed: true,
        },
    }
}

/// Forward-simulates the three datasheet points of a panel.
pub fn make_synthetic_datasheet(ground_truth: &SdmParams) -> Result<IvTargets> {
    ground_truth.validate()?;
    let p = ground_truth;
    let isc = sdm_current(p, 0.0)?;

    // I(v) > 0 exactly when the implicit residual at I = 0 is positive, so
    // the open-circuit search needs no inner solve.
    let positive = |v: f64| implicit_residual(p, v, 0.0) > 0.0;
    let (mut lo, mut hi) = (0.0, 2.0 * p.a * (p.i_l / p.i_o + 1.0).ln());
    if positive(hi) {
        return Err(Error::Solver("open-circuit voltage outside bracket".into()));
    }
    while hi - lo > VOLTAGE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let voc = 0.5 * (lo + hi);

    let power = |v: f64| sdm_current(p, v).map(|i| v * i);
    let step = voc / (MPP_SCAN_POINTS - 1) as f64;
    let mut best_k = 0;
    let mut best_p = f64::NEG_INFINITY;
    for k in 0..MPP_SCAN_POINTS {
        let pw = power(k as f64 * step)?;
        if pw > best_p {
            best_p = pw;
            best_k = k;
        }
    }
    let a = best_k.saturating_sub(1) as f64 * step;
    let b = ((best_k + 1).min(MPP_SCAN_POINTS - 1) as f64 * step).min(voc);
    let vmp = golden_section_max(a, b, power)?;
    let imp = sdm_current(p, vmp)?;
    Ok(IvTargets { isc, vmp, imp, voc })
}

fn golden_section_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > VOLTAGE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Fitting grids for `[i_l, i_o, r_s, r_sh, a]`, the photocurrent grid
/// centred on the datasheet's short-circuit current.
pub fn sdm_search_space(targets: &IvTargets) -> Result<SearchSpace> {
    SearchSpace::new(vec![
        make_grid(
            "i_l",
            0.8 * targets.isc,
            1.2 * targets.isc,
            41,
            GridScale::Linear,
        )?,
        make_grid("i_o", 1e-12, 1e-6, 61, GridScale::Log)?,
        make_grid("r_s", 0.0, 1.0, 41, GridScale::Linear)?,
        make_grid("r_sh", 10.0, 1e4, 41, GridScale::Log)?,
        make_grid("a", 1.0, 4.0, 31, GridScale::Linear)?,
    ])
}

/// The datasheet-fitting objective over [`sdm_search_space`] points.
///
/// Minimizes `log10` of the residual, which keeps the wildly different
/// magnitudes of bad fits from swamping the surrogates; failed solves are
/// reported as NaN so the optimizer drops them.
#[derive(Debug, Clone, Copy)]
pub struct SdmObjective {
    pub targets: IvTargets,
}

impl SdmObjective {
    pub fn residual(&self, point: &[f64]) -> Residual {
        sdm_residual(&SdmParams::from_point(point), &self.targets)
    }

    /// Maps an objective value back to the residual.
    pub fn to_residual(value: f64) -> f64 {
        10f64.powf(value)
    }
}

impl Objective for SdmObjective {
    fn evaluate(&self, point: &[f64]) -> f64 {
        let r = self.residual(point);
        if r.failed {
            f64::NAN
        } else {
            r.value.max(1e-300).log10()
        }
    }
}

/// Datasheet targets plus, for synthetic sheets, the parameters that
/// generated them. Stored as plain `key=value` lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Datasheet {
    pub targets: IvTargets,
    pub ground_truth: Option<SdmParams>,
}

impl Datasheet {
    pub fn synthetic(ground_truth: SdmParams) -> Result<Self> {
        Ok(Self {
            targets: make_synthetic_datasheet(&ground_truth)?,
            ground_truth: Some(ground_truth),
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))?
            .parse()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for Datasheet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.targets;
        writeln!(f, "isc={}", t.isc)?;
        writeln!(f, "vmp={}", t.vmp)?;
        writeln!(f, "imp={}", t.imp)?;
        writeln!(f, "voc={}", t.voc)?;
        if let Some(p) = &self.ground_truth {
            writeln!(f, "i_l={}", p.i_l)?;
            writeln!(f, "i_o={}", p.i_o)?;
            writeln!(f, "r_s={}", p.r_s)?;
            writeln!(f, "r_sh={}", p.r_sh)?;
            writeln!(f, "a={}", p.a)?;
        }
        Ok(())
    }
}

impl FromStr for Datasheet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: String| Error::Parse {
            what: "datasheet".into(),
            reason,
        };
        let mut fields = std::collections::HashMap::new();
        for (n, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("line {}: expected key=value", n + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("line {}: {e}", n + 1)))?;
            fields.insert(k.trim().to_string(), v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| parse_err(format!("missing key `{k}`")))
        };
        let targets = IvTargets {
            isc: get("isc")?,
            vmp: get("vmp")?,
            imp: get("imp")?,
            voc: get("voc")?,
        };
        targets.validate()?;
        let gt_keys = ["i_l", "i_o", "r_s", "r_sh", "a"];
        let ground_truth = if gt_keys.iter().any(|k| fields.contains_key(*k)) {
            let p = SdmParams {
                i_l: get("i_l")?,
                i_o: get("i_o")?,
                r_s: get("r_s")?,
                r_sh: get("r_sh")?,
                a: get("a")?,
            };
            p.validate()?;
            Some(p)
        } else {
            None
        };
        Ok(Self {
            targets,
            ground_truth,
        })
    }
}
