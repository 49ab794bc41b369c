//! Explicit Runge–Kutta integration of three-state systems with singular-locus events.

mod dense;

pub use dense::hermite;

use serde::Serialize;
use thiserror::Error;

use crate::report::{f17, f17_opt, f17_vec};

pub type State = [f64; 3];

/// A first-order system `y' = f(s, y)` with optional singular loci.
pub trait OdeSystem {
    fn rhs(&self, s: f64, y: &State) -> State;

    /// Names of the singular-locus expressions.
    fn loci(&self) -> Vec<String> {
        Vec::new()
    }

    /// Value of locus `k`; a sign change ends the integration.
    fn locus(&self, _k: usize, _s: f64, _y: &State) -> f64 {
        f64::NAN
    }
}

impl<F: Fn(f64, &State) -> State> OdeSystem for F {
    fn rhs(&self, s: f64, y: &State) -> State {
        self(s, y)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("tolerances must be positive, got rel {rel} abs {abs}")]
    InvalidTolerance { rel: f64, abs: f64 },
    #[error("initial point lies on the singular locus {locus} (value {value:e})")]
    StartOnLocus { locus: String, value: f64 },
    #[error("non-finite right-hand side at s = {at} (state {state:?})")]
    NonFinite { at: f64, state: State },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Euler,
    Rk4,
    Dp45,
}

impl Method {
    pub fn order(self) -> u32 {
        match self {
            Method::Euler => 1,
            Method::Rk4 => 4,
            Method::Dp45 => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// A locus changed sign within a step; located by bisection.
    SignChange,
    /// The step size collapsed or the locus value fell below the event tolerance.
    LocusApproach,
}

#[derive(Clone, Debug, Serialize)]
pub struct Event {
    pub locus: String,
    pub kind: EventKind,
    #[serde(serialize_with = "f17")]
    pub at: f64,
    #[serde(serialize_with = "f17_vec")]
    pub state: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub locus_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Event,
    StepUnderflow,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    #[serde(serialize_with = "f17")]
    pub s: f64,
    #[serde(serialize_with = "f17_vec")]
    pub y: Vec<f64>,
    #[serde(serialize_with = "f17_vec")]
    pub dy: Vec<f64>,
}

/// Integration output: samples with derivatives, events and step metadata.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub method: Method,
    #[serde(serialize_with = "f17_opt")]
    pub step: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub rel_tol: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub abs_tol: Option<f64>,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub termination: Termination,
    pub stats: StepStats,
}

/// Metadata and events without the samples, for the sidecar file.
#[derive(Serialize)]
pub struct TrajectorySummary<'a> {
    pub method: Method,
    #[serde(serialize_with = "f17_opt")]
    pub step: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub rel_tol: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub abs_tol: Option<f64>,
    pub samples: usize,
    #[serde(serialize_with = "f17_vec")]
    pub range: Vec<f64>,
    pub termination: Termination,
    pub stats: &'a StepStats,
    pub events: &'a [Event],
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("a trajectory holds its initial sample")
    }

    pub fn final_state(&self) -> State {
        let y = &self.last().y;
        [y[0], y[1], y[2]]
    }

    /// Sampled range `(lo, hi)` of the independent variable.
    pub fn range(&self) -> (f64, f64) {
        let a = self.samples[0].s;
        let b = self.last().s;
        (a.min(b), a.max(b))
    }

    /// Cubic Hermite interpolation of the state at `s`; `None` outside the range.
    pub fn interpolate(&self, s: f64) -> Option<State> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&s) {
            return None;
        }
        let forward = self.samples.len() < 2 || self.samples[1].s > self.samples[0].s;
        let k = if forward {
            self.samples.partition_point(|p| p.s < s)
        } else {
            self.samples.partition_point(|p| p.s > s)
        };
        if k == 0 {
            let y = &self.samples[0].y;
            return Some([y[0], y[1], y[2]]);
        }
        let (a, b) = (
            &self.samples[k - 1],
            &self.samples[k.min(self.samples.len() - 1)],
        );
        Some(hermite(a, b, s))
    }

    /// CSV with header `indep,H,U,V,dH,dU,dV`.
    pub fn to_csv(&self, indep: &str) -> String {
        let mut out = format!("{indep},H,U,V,dH,dU,dV\n");
        for p in &self.samples {
            let cols: Vec<String> = std::iter::once(p.s)
                .chain(p.y.iter().copied())
                .chain(p.dy.iter().copied())
                .map(crate::report::format_f64)
                .collect();
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> TrajectorySummary<'_> {
        let (lo, hi) = self.range();
        TrajectorySummary {
            method: self.method,
            step: self.step,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            samples: self.samples.len(),
            range: vec![lo, hi],
            termination: self.termination,
            stats: &self.stats,
            events: &self.events,
        }
    }
}

/// Event tolerance on locus values.
pub const EVENT_TOL: f64 = 1e-10;

fn finite(y: &State) -> bool {
    y.iter().all(|v| v.is_finite())
}

fn axpy(y: &State, h: f64, k: &State) -> State {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]]
}

fn combo(y: &State, h: f64, ks: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in ks {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

struct Counter<'a, S: OdeSystem + ?Sized> {
    sys: &'a S,
    evals: usize,
}

impl<S: OdeSystem + ?Sized> Counter<'_, S> {
    fn f(&mut self, s: f64, y: &State) -> State {
        self.evals += 1;
        self.sys.rhs(s, y)
    }
}

fn rk4_step<S: OdeSystem + ?Sized>(c: &mut Counter<S>, s: f64, y: &State, h: f64) -> State {
    let k1 = c.f(s, y);
    let k2 = c.f(s + h / 2.0, &axpy(y, h / 2.0, &k1));
    let k3 = c.f(s + h / 2.0, &axpy(y, h / 2.0, &k2));
    let k4 = c.f(s + h, &axpy(y, h, &k3));
    combo(
        y,
        h,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
    )
}

fn euler_step<S: OdeSystem + ?Sized>(c: &mut Counter<S>, s: f64, y: &State, h: f64) -> State {
    axpy(y, h, &c.f(s, y))
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step: fifth-order solution and error estimate.
fn dp_step<S: OdeSystem + ?Sized>(
    c: &mut Counter<S>,
    s: f64,
    y: &State,
    k1: &State,
    h: f64,
) -> (State, State, State) {
    let mut k = [[0.0; 3]; 7];
    k[0] = *k1;
    for stage in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage - 1][j];
            for i in 0..3 {
                yi[i] += h * a * kj[i];
            }
        }
        k[stage] = c.f(s + C[stage] * h, &yi);
        if stage == 6 {
            let mut err = [0.0; 3];
            for (j, kj) in k.iter().enumerate() {
                for i in 0..3 {
                    err[i] += h * E[j] * kj[i];
                }
            }
            return (yi, k[6], err);
        }
    }
    unreachable!()
}

struct Loci<'a, S: OdeSystem + ?Sized> {
    sys: &'a S,
    names: Vec<String>,
}

impl<S: OdeSystem + ?Sized> Loci<'_, S> {
    fn values(&self, s: f64, y: &State) -> Vec<f64> {
        (0..self.names.len())
            .map(|k| self.sys.locus(k, s, y))
            .collect()
    }

    fn check_start(&self, s: f64, y: &State) -> Result<Vec<f64>, OdeError> {
        let v = self.values(s, y);
        for (n, x) in self.names.iter().zip(&v) {
            if !(x.abs() > EVENT_TOL) {
                return Err(OdeError::StartOnLocus {
                    locus: n.clone(),
                    value: *x,
                });
            }
        }
        Ok(v)
    }

    fn crossed(&self, before: &[f64], s: f64, y: &State) -> Option<usize> {
        let after = self.values(s, y);
        before
            .iter()
            .zip(&after)
            .position(|(a, b)| b.is_finite() && a.signum() != b.signum())
    }

    fn nearest(&self, s: f64, y: &State) -> Option<(usize, f64)> {
        self.values(s, y)
            .into_iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    }
}

/// Bisect on the fraction `theta` of a step for a sign change of locus `k`,
/// re-taking the step from `(s, y)` with length `theta * h`.
fn refine_event<S: OdeSystem + ?Sized>(
    loci: &Loci<S>,
    k: usize,
    s: f64,
    y: &State,
    h: f64,
    before: f64,
    mut step: impl FnMut(f64) -> State,
) -> (f64, State, f64) {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut best = (s + h, step(1.0), f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let ym = step(mid);
        let v = loci.sys.locus(k, s + mid * h, &ym);
        if v.is_finite() && v.abs() < best.2.abs() {
            best = (s + mid * h, ym, v);
        }
        if v.abs() < EVENT_TOL || (hi - lo) * h.abs() < 1e-15 * s.abs().max(1.0) {
            break;
        }
        if v.is_finite() && v.signum() == before.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let _ = y;
    best
}

fn sample(s: f64, y: State, dy: State) -> Sample {
    Sample {
        s,
        y: y.to_vec(),
        dy: dy.to_vec(),
    }
}

/// Fixed-step integration from `s0` to `s1` (either direction) with step `h > 0`.
pub fn integrate_fixed<S: OdeSystem + ?Sized>(
    sys: &S,
    method: Method,
    y0: State,
    s0: f64,
    s1: f64,
    h: f64,
) -> Result<Trajectory, OdeError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(OdeError::InvalidStep(h));
    }
    let loci = Loci {
        sys,
        names: sys.loci(),
    };
    let mut signs = loci.check_start(s0, &y0)?;
    let mut c = Counter { sys, evals: 0 };
    let dir = (s1 - s0).signum();
    let mut traj = Trajectory {
        method,
        step: Some(h),
        rel_tol: None,
        abs_tol: None,
        samples: vec![sample(s0, y0, c.f(s0, &y0))],
        events: Vec::new(),
        termination: Termination::Completed,
        stats: StepStats::default(),
    };
    let take = |c: &mut Counter<S>, s: f64, y: &State, h: f64| match method {
        Method::Euler => euler_step(c, s, y, h),
        _ => rk4_step(c, s, y, h),
    };
    let n = ((s1 - s0).abs() / h).ceil().max(1.0) as usize;
    let (mut s, mut y) = (s0, y0);
    for i in 0..n {
        let s_next = if i + 1 == n {
            s1
        } else {
            s0 + dir * h * (i + 1) as f64
        };
        let hs = s_next - s;
        let y_next = take(&mut c, s, &y, hs);
        traj.stats.accepted += 1;
        if let Some(k) = loci.crossed(&signs, s_next, &y_next) {
            let before = signs[k];
            let (at, ye, v) = refine_event(&loci, k, s, &y, hs, before, |theta| {
                take(&mut c, s, &y, theta * hs)
            });
            let dy = c.f(at, &ye);
            traj.samples.push(sample(at, ye, dy));
            traj.events.push(Event {
                locus: loci.names[k].clone(),
                kind: EventKind::SignChange,
                at,
                state: ye.to_vec(),
                locus_value: v,
            });
            traj.termination = Termination::Event;
            break;
        }
        let dy = c.f(s_next, &y_next);
        if !finite(&y_next) || !finite(&dy) {
            return Err(OdeError::NonFinite {
                at: s_next,
                state: y_next,
            });
        }
        signs = loci.values(s_next, &y_next);
        traj.samples.push(sample(s_next, y_next, dy));
        s = s_next;
        y = y_next;
    }
    traj.stats.rhs_evals = c.evals;
    Ok(traj)
}

/// Starting step from the derivative and curvature scales (Hairer, Nørsett, Wanner).
fn initial_step<S: OdeSystem + ?Sized>(
    c: &mut Counter<'_, S>,
    s0: f64,
    y0: &State,
    f0: &State,
    dir: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    let rms = |v: &dyn Fn(usize) -> f64| {
        ((0..3)
            .map(|i| (v(i) / (abs_tol + rel_tol * y0[i].abs())).powi(2))
            .sum::<f64>()
            / 3.0)
            .sqrt()
    };
    let d0 = rms(&|i| y0[i]);
    let d1 = rms(&|i| f0[i]);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: State = std::array::from_fn(|i| y0[i] + dir * h0 * f0[i]);
    let f1 = c.f(s0 + dir * h0, &y1);
    if !finite(&f1) {
        return h0;
    }
    let d2 = rms(&|i| f1[i] - f0[i]) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Adaptive Dormand–Prince 5(4) integration with PI step control.
pub fn integrate_adaptive<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: State,
    s0: f64,
    s1: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory, OdeError> {
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(OdeError::InvalidTolerance {
            rel: rel_tol,
            abs: abs_tol,
        });
    }
    let loci = Loci {
        sys,
        names: sys.loci(),
    };
    let mut signs = loci.check_start(s0, &y0)?;
    let mut c = Counter { sys, evals: 0 };
    let dir = (s1 - s0).signum();
    let span = (s1 - s0).abs();
    let mut k1 = c.f(s0, &y0);
    if !finite(&k1) {
        return Err(OdeError::NonFinite { at: s0, state: y0 });
    }
    let mut traj = Trajectory {
        method: Method::Dp45,
        step: None,
        rel_tol: Some(rel_tol),
        abs_tol: Some(abs_tol),
        samples: vec![sample(s0, y0, k1)],
        events: Vec::new(),
        termination: Termination::Completed,
        stats: StepStats::default(),
    };
    let norm = |y: &State, yn: &State, err: &State| -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            let sc = abs_tol + rel_tol * y[i].abs().max(yn[i].abs());
            acc += (err[i] / sc).powi(2);
        }
        (acc / 3.0).sqrt()
    };
    let mut h = initial_step(&mut c, s0, &y0, &k1, dir, rel_tol, abs_tol)
        .min(span)
        .max(span * 1e-12);
    let (mut s, mut y) = (s0, y0);
    let mut err_prev: f64 = 1e-4;
    while (s1 - s) * dir > 0.0 {
        let h_min = 1e-14 * s.abs().max(span).max(1.0);
        if h < h_min {
            traj.termination = Termination::StepUnderflow;
            if let Some((k, v)) = loci.nearest(s, &y) {
                traj.events.push(Event {
                    locus: loci.names[k].clone(),
                    kind: EventKind::LocusApproach,
                    at: s,
                    state: y.to_vec(),
                    locus_value: v,
                });
            }
            break;
        }
        let hs = dir * h.min((s1 - s).abs());
        let (yn, kn, err) = dp_step(&mut c, s, &y, &k1, hs);
        let e = if finite(&yn) && finite(&kn) {
            norm(&y, &yn, &err)
        } else {
            f64::INFINITY
        };
        if e > 1.0 {
            traj.stats.rejected += 1;
            let fac = if e.is_finite() {
                (0.9 * e.powf(-0.2)).clamp(0.1, 1.0)
            } else {
                0.25
            };
            h *= fac;
            continue;
        }
        traj.stats.accepted += 1;
        let s_next = if (s1 - (s + hs)) * dir <= 0.0 {
            s1
        } else {
            s + hs
        };
        if let Some(k) = loci.crossed(&signs, s_next, &yn) {
            let before = signs[k];
            let (at, ye, v) = refine_event(&loci, k, s, &y, hs, before, |theta| {
                let k1 = k1;
                dp_step(&mut c, s, &y, &k1, theta * hs).0
            });
            let dy = c.f(at, &ye);
            traj.samples.push(sample(at, ye, dy));
            traj.events.push(Event {
                locus: loci.names[k].clone(),
                kind: EventKind::SignChange,
                at,
                state: ye.to_vec(),
                locus_value: v,
            });
            traj.termination = Termination::Event;
            break;
        }
        signs = loci.values(s_next, &yn);
        traj.samples.push(sample(s_next, yn, kn));
        s = s_next;
        y = yn;
        k1 = kn;
        if let Some((k, v)) = loci.nearest(s, &y).filter(|(_, v)| v.abs() < EVENT_TOL) {
            traj.events.push(Event {
                locus: loci.names[k].clone(),
                kind: EventKind::LocusApproach,
                at: s,
                state: y.to_vec(),
                locus_value: v,
            });
            traj.termination = Termination::Event;
            break;
        }
        // PI controller
        let e = e.max(1e-10);
        let fac = 0.9 * e.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
        h = (h * fac.clamp(0.2, 5.0)).min(span);
        err_prev = e;
    }
    traj.stats.rhs_evals = c.evals;
    Ok(traj)
}

/// Result of a step-refinement study.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub method: Method,
    #[serde(serialize_with = "f17_vec")]
    pub steps: Vec<f64>,
    #[serde(serialize_with = "f17_vec")]
    pub errors: Vec<f64>,
    #[serde(serialize_with = "f17")]
    pub order: f64,
    /// `false` when the errors do not decrease with the step.
    pub monotone: bool,
    pub reference: String,
}

/// Least-squares slope of `log error` against `log step`. Errors are measured at
/// `s1` against `exact`, or against the finest step when `exact` is `None`.
pub fn convergence_order<S: OdeSystem + ?Sized>(
    sys: &S,
    method: Method,
    y0: State,
    s0: f64,
    s1: f64,
    steps: &[f64],
    exact: Option<State>,
) -> Result<ConvergenceReport, OdeError> {
    let mut steps = steps.to_vec();
    steps.sort_by(|a, b| b.total_cmp(a));
    let finals: Vec<State> = steps
        .iter()
        .map(|&h| integrate_fixed(sys, method, y0, s0, s1, h).map(|t| t.final_state()))
        .collect::<Result<_, _>>()?;
    let (reference, label, used) = match exact {
        Some(e) => (e, "exact".to_string(), steps.len()),
        None => (
            *finals.last().expect("at least one step"),
            format!("step {:e}", steps.last().unwrap()),
            steps.len() - 1,
        ),
    };
    let errors: Vec<f64> = finals[..used]
        .iter()
        .map(|f| {
            (0..3)
                .map(|i| (f[i] - reference[i]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let xs: Vec<f64> = steps[..used].iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors
        .iter()
        .map(|e| e.max(f64::MIN_POSITIVE).ln())
        .collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ConvergenceReport {
        method,
        steps: steps[..used].to_vec(),
        monotone: errors.windows(2).all(|w| w[1] < w[0]),
        errors,
        order: sxy / sxx,
        reference: label,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(t: f64, y: &State) -> State {
        [-y[0] / t, -y[1] / t, -y[2] / t]
    }

    #[test]
    fn rk4_inverse_decay() {
        let tr = integrate_fixed(&decay, Method::Rk4, [1.0; 3], 1.0, 2.0, 1e-3).unwrap();
        assert!((tr.final_state()[0] - 0.5).abs() < 1e-9);
        assert_eq!(tr.last().s, 2.0);
    }

    #[test]
    fn rk4_is_exact_on_inverse_decay() {
        let r = convergence_order(
            &decay,
            Method::Rk4,
            [1.0; 3],
            1.0,
            2.0,
            &[0.1, 0.05, 0.025],
            Some([0.5; 3]),
        )
        .unwrap();
        assert!(r.errors.iter().all(|e| *e < 1e-14), "{r:?}");
    }

    #[test]
    fn rk4_order_on_quadratic_decay() {
        let f = |t: f64, y: &State| [-2.0 * y[0] / t, -2.0 * y[1] / t, -2.0 * y[2] / t];
        let r = convergence_order(
            &f,
            Method::Rk4,
            [1.0; 3],
            1.0,
            2.0,
            &[0.1, 0.05, 0.025, 0.0125],
            Some([0.25; 3]),
        )
        .unwrap();
        assert!((r.order - 4.0).abs() < 0.2, "{r:?}");
        assert!(r.monotone);
    }

    #[test]
    fn euler_order() {
        let r = convergence_order(
            &decay,
            Method::Euler,
            [1.0; 3],
            1.0,
            2.0,
            &[0.01, 0.005, 0.0025, 0.00125],
            Some([0.5; 3]),
        )
        .unwrap();
        assert!((r.order - 1.0).abs() < 0.2, "{r:?}");
        let r = convergence_order(
            &decay,
            Method::Euler,
            [1.0; 3],
            1.0,
            2.0,
            &[0.01, 0.005, 0.0025, 1e-6],
            None,
        )
        .unwrap();
        assert!((r.order - 1.0).abs() < 0.2, "{r:?}");
    }

    #[test]
    fn rejects_bad_step() {
        assert_eq!(
            integrate_fixed(&decay, Method::Rk4, [1.0; 3], 1.0, 2.0, 0.0).unwrap_err(),
            OdeError::InvalidStep(0.0)
        );
    }

    struct Approach;
    impl OdeSystem for Approach {
        fn rhs(&self, _s: f64, y: &State) -> State {
            [-1.0, 0.0, y[2] / y[0]]
        }
        fn loci(&self) -> Vec<String> {
            vec!["y0".into()]
        }
        fn locus(&self, _k: usize, _s: f64, y: &State) -> f64 {
            y[0]
        }
    }

    #[test]
    fn fixed_step_event_is_refined() {
        let tr = integrate_fixed(&Approach, Method::Rk4, [0.55, 0.0, 1.0], 0.0, 2.0, 0.1).unwrap();
        assert_eq!(tr.termination, Termination::Event);
        let e = &tr.events[0];
        assert!(e.locus_value.abs() < EVENT_TOL);
        assert!((e.at - 0.55).abs() < 1e-9);
    }

    #[test]
    fn adaptive_stops_at_locus() {
        let tr = integrate_adaptive(&Approach, [0.55, 0.0, 1.0], 0.0, 2.0, 1e-8, 1e-10).unwrap();
        let e = tr.events.first().expect("event");
        assert!(
            e.locus_value.abs() < EVENT_TOL,
            "{e:?} {:?}",
            tr.termination
        );
        assert!(tr.samples.iter().all(|p| p.y[0] > -EVENT_TOL));
    }

    #[test]
    fn start_on_locus_is_rejected() {
        assert!(matches!(
            integrate_fixed(&Approach, Method::Rk4, [0.0, 0.0, 1.0], 0.0, 1.0, 0.1),
            Err(OdeError::StartOnLocus { .. })
        ));
    }
}
