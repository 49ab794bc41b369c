use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use super::{exit, parse_state, CliError, Common, IntegrateArgs, MethodArg, Output, ResidualArgs};
use crate::algebra::{
    builtin_fixture, load_fixture, structure_constants, LieAlgebra, TableKind, TableReport,
    FIXTURE_NAMES,
};
use crate::expr::{names, Bindings, Expr, Symbol};
use crate::lie::{catalog, search_corrections, Edit, VectorField};
use crate::ode::{
    integrate_adaptive, integrate_fixed, Method, State, Trajectory, TrajectorySummary,
};
use crate::reductions::{
    compare_equation, equator_y2y5, figure_setup, reconstruct_residual, reference_equations,
    ClosedFormSolution, EquationComparison, FigureSetup, Locus, ReductionKind, ResidualReport,
    Solution,
};
use crate::report::{f17_opt, f17_vec, format_f64, to_json};
use crate::swe::{PdeSystem, SystemKind};

fn param_listing(b: &Bindings) -> BTreeMap<String, String> {
    b.iter()
        .map(|(k, v)| (k.to_string(), format_f64(*v)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    /// The printed form fails and a documented single-edit correction verifies.
    Corrected,
    Unresolved,
}

#[derive(Serialize)]
struct DocumentedCorrection {
    field: VectorField,
    verified: bool,
}

#[derive(Serialize)]
struct GeneratorVerdict {
    label: String,
    status: Status,
    literal_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    literal_residuals: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimal_edits: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    corrections: Vec<Vec<Edit>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    documented: Option<DocumentedCorrection>,
}

#[derive(Serialize)]
struct VerifyReport {
    system: SystemKind,
    params: BTreeMap<String, String>,
    search_depth: usize,
    generators: Vec<GeneratorVerdict>,
    unresolved: Vec<String>,
}

fn bind_field(f: &VectorField, b: &BTreeMap<Symbol, Expr>) -> Result<VectorField, CliError> {
    let c = f.components();
    let mut sub = Vec::with_capacity(6);
    for e in c {
        sub.push(e.substitute(b)?);
    }
    let [a0, a1, a2, a3, a4, a5]: [Expr; 6] = sub.try_into().unwrap_or_else(|_| unreachable!());
    let mut out = VectorField::new([a0, a1, a2], [a3, a4, a5]);
    out.label = f.label.clone();
    Ok(out)
}

pub(super) fn verify(common: &Common, depth: usize) -> Result<Output, CliError> {
    let kind = common
        .system
        .ok_or_else(|| CliError::Usage("verify needs --system".into()))?;
    if !(1..=2).contains(&depth) {
        return Err(CliError::Usage(format!(
            "--depth must be 1 or 2, got {depth}"
        )));
    }
    let cat = catalog(kind);
    let symbolic = cat.pde();
    let exact = common.exact(kind)?;
    let sys = symbolic.specialize(kind, &exact);
    let mut generators = Vec::new();
    for entry in &cat.entries {
        let literal = bind_field(&entry.printed_field(), &exact)?.is_symmetry(&sys);
        let mut v = GeneratorVerdict {
            label: entry.label.to_string(),
            status: Status::Verified,
            literal_verified: literal.verified,
            literal_residuals: None,
            minimal_edits: None,
            corrections: Vec::new(),
            documented: None,
        };
        if !literal.verified {
            v.literal_residuals = Some(literal.residuals.iter().map(Expr::to_string).collect());
            let search = search_corrections(entry.label, &entry.printed, &symbolic, depth)?;
            v.minimal_edits = search.minimal_edits();
            v.corrections = search.corrections.into_iter().map(|c| c.edits).collect();
            v.documented = match &entry.corrected {
                Some(_) => {
                    let field = bind_field(&entry.field(), &exact)?;
                    let verified = field.is_symmetry(&sys).verified;
                    Some(DocumentedCorrection { field, verified })
                }
                None => None,
            };
            let documented_ok = v.documented.as_ref().is_some_and(|d| d.verified);
            v.status = if documented_ok && v.minimal_edits == Some(1) {
                Status::Corrected
            } else {
                Status::Unresolved
            };
        }
        generators.push(v);
    }
    let unresolved: Vec<String> = generators
        .iter()
        .filter(|g| g.status == Status::Unresolved)
        .map(|g| g.label.clone())
        .collect();
    let code = if unresolved.is_empty() {
        exit::OK
    } else {
        exit::FAILED
    };
    let report = VerifyReport {
        system: kind,
        params: exact
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        search_depth: depth,
        generators,
        unresolved,
    };
    Ok(Output {
        report: to_json(&report),
        files: Vec::new(),
        code,
    })
}

#[derive(Serialize)]
struct AlgebraChecks {
    system: SystemKind,
    basis: Vec<String>,
    antisymmetry_defects: usize,
    jacobi_defects: usize,
    #[serde(serialize_with = "crate::report::f17")]
    max_automorphism_defect: f64,
}

#[derive(Serialize)]
struct TablesReport {
    tables: Vec<TableReport>,
    algebras: Vec<AlgebraChecks>,
}

pub(super) fn tables(common: &Common, wanted: &[String]) -> Result<Output, CliError> {
    let names: Vec<String> = if wanted.is_empty() {
        FIXTURE_NAMES.iter().map(|s| s.to_string()).collect()
    } else {
        wanted.to_vec()
    };
    let tol = common.tol.unwrap_or(1e-10);
    let omegas = match common.omega {
        Some(super::ParamValue::Numeric(x)) => vec![x],
        _ => vec![0.5, 1.0],
    };
    let samples: Vec<(f64, f64)> = [0.1, 0.5, 1.0]
        .iter()
        .flat_map(|&e| omegas.iter().map(move |&o| (e, o)))
        .collect();
    let mut algebras: BTreeMap<SystemKind, LieAlgebra> = BTreeMap::new();
    let mut reports = Vec::new();
    let mut files = Vec::new();
    for name in &names {
        let fx = match &common.fixtures {
            Some(dir) => load_fixture(dir, name)?,
            None => builtin_fixture(name)
                .ok_or_else(|| CliError::MissingFixture(format!("tables/{name}")))?,
        };
        if common.system.is_some_and(|k| k != fx.system) {
            continue;
        }
        if !algebras.contains_key(&fx.system) {
            algebras.insert(
                fx.system,
                structure_constants(&catalog(fx.system).fields())?,
            );
        }
        let alg = &algebras[&fx.system];
        let r = match fx.kind {
            TableKind::Commutator => TableReport::commutators(alg, &fx)?,
            TableKind::Adjoint => TableReport::adjoint(alg, &fx, &samples, tol)?,
        };
        files.push((
            PathBuf::from("tables").join(format!("{name}.json")),
            to_json(&r),
        ));
        files.push((
            PathBuf::from("tables").join(format!("{name}.txt")),
            r.to_text(),
        ));
        reports.push(r);
    }
    let mut checks = Vec::new();
    for (kind, alg) in &algebras {
        let mut worst: f64 = 0.0;
        for &(eps, omega) in &samples {
            let mut p = Bindings::new();
            p.insert(Symbol::param(names::OMEGA), omega);
            for i in 0..alg.dim() {
                let ad = alg.adjoint_numeric(i, eps, &p)?;
                worst = worst.max(alg.automorphism_defect(&ad, &p)?);
            }
        }
        checks.push(AlgebraChecks {
            system: *kind,
            basis: alg.basis.clone(),
            antisymmetry_defects: alg.antisymmetry_defects().len(),
            jacobi_defects: alg.jacobi_defects().len(),
            max_automorphism_defect: worst,
        });
    }
    let report = TablesReport {
        tables: reports,
        algebras: checks,
    };
    Ok(Output {
        report: to_json(&report),
        files,
        code: exit::OK,
    })
}

#[derive(Serialize)]
struct AnsatzListing {
    indep: String,
    variable: String,
    fields: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct ClosedFormListing {
    states: BTreeMap<String, String>,
    exact: bool,
}

#[derive(Serialize)]
struct ReductionListing {
    reduction: ReductionKind,
    system: SystemKind,
    ansatz: AnsatzListing,
    equations: BTreeMap<String, String>,
    loci: Vec<Locus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<ClosedFormListing>,
    comparisons: Vec<EquationComparison>,
}

const STATE_NAMES: [&str; 3] = ["H", "U", "V"];
const FIELD_NAMES: [&str; 3] = ["h", "u", "v"];

fn listing(kind: ReductionKind, common: &Common) -> Result<ReductionListing, CliError> {
    let sk = kind.system();
    let exact = common.exact(sk)?;
    let sys = PdeSystem::build(sk, Default::default()).specialize(sk, &exact);
    let ode = kind.derive(&sys)?;
    let ansatz = kind.ansatz();
    let prime = |k: usize| format!("{}'", STATE_NAMES[k]);

    let closed_form = if kind == ReductionKind::EquatorY2y5 {
        let (_, sol) = equator_y2y5();
        let mut states = Vec::new();
        for s in &sol.states {
            states.push(s.substitute(&exact)?);
        }
        let sol = ClosedFormSolution {
            indep: sol.indep,
            states: states.try_into().unwrap_or_else(|_| unreachable!()),
        };
        let exact_solution = sol.residuals(&ode)?.iter().all(Expr::is_zero);
        Some(ClosedFormListing {
            states: (0..3)
                .map(|k| (STATE_NAMES[k].to_string(), sol.states[k].to_string()))
                .collect(),
            exact: exact_solution,
        })
    } else {
        None
    };

    let reference = reference_equations(kind.name(), common.fixtures.as_deref())?;
    let det = Expr::product(ode.singular_locus.iter().map(|l| l.expr.clone()));
    let mut comparisons = Vec::new();
    for name in reference.definitions.keys() {
        let derived = ode
            .singular_locus
            .iter()
            .find(|l| &l.name == name)
            .map_or(det.clone(), |l| l.expr.clone());
        let printed = reference.definition(name)?.substitute(&exact)?;
        comparisons.push(compare_equation(name, &derived, &printed, None));
    }
    for eq in &reference.equations {
        let k = STATE_NAMES
            .iter()
            .position(|s| *s == eq.state)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "equation {}: unknown state `{}`",
                    eq.label, eq.state
                ))
            })?;
        let printed = reference.rhs(&eq.label)?.substitute(&exact)?;
        comparisons.push(compare_equation(
            &eq.label,
            &ode.rhs[k],
            &printed,
            Some(&det),
        ));
    }

    Ok(ReductionListing {
        reduction: kind,
        system: sk,
        ansatz: AnsatzListing {
            indep: ansatz.indep.name().to_string(),
            variable: ansatz.variable.to_string(),
            fields: (0..3)
                .map(|k| (FIELD_NAMES[k].to_string(), ansatz.fields[k].to_string()))
                .collect(),
        },
        equations: (0..3).map(|k| (prime(k), ode.rhs[k].to_string())).collect(),
        loci: ode.singular_locus.clone(),
        closed_form,
        comparisons,
    })
}

pub(super) fn reduce(common: &Common, only: Option<ReductionKind>) -> Result<Output, CliError> {
    let kinds: Vec<ReductionKind> = ReductionKind::ALL
        .into_iter()
        .filter(|k| only.is_none_or(|o| o == *k))
        .filter(|k| common.system.is_none_or(|s| s == k.system()))
        .collect();
    let mut out = Vec::new();
    for k in kinds {
        out.push(listing(k, common)?);
    }
    Ok(Output {
        report: to_json(&out),
        files: Vec::new(),
        code: exit::OK,
    })
}

/// Parameters and range used when a reduction is run without a figure fixture.
fn default_setup(kind: ReductionKind, common: &Common) -> Result<FigureSetup, CliError> {
    let dir = common.fixtures.as_deref();
    Ok(match kind {
        ReductionKind::TravellingWave => figure_setup("fig1", dir)?,
        ReductionKind::EquatorY4y5 => figure_setup("fig2", dir)?,
        ReductionKind::EquatorY2y5 => {
            let mut s = figure_setup("fig2", dir)?;
            s.name = kind.name().into();
            s.reduction = kind;
            s.range = [1.0, 5.0];
            s
        }
    })
}

#[derive(Serialize)]
struct Run<'a> {
    label: &'a str,
    #[serde(serialize_with = "f17_vec")]
    initial: &'a [f64],
    csv: String,
    summary: TrajectorySummary<'a>,
}

#[derive(Serialize)]
struct IntegrateReport<'a> {
    setup: &'a FigureSetup,
    method: Method,
    runs: Vec<Run<'a>>,
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Dp45 => Method::Dp45,
        MethodArg::Rk4 => Method::Rk4,
        MethodArg::Euler => Method::Euler,
    }
}

pub(super) fn integrate(common: &Common, args: &IntegrateArgs) -> Result<Output, CliError> {
    let mut setup = match (&args.figure, args.reduction) {
        (Some(name), _) => figure_setup(name, common.fixtures.as_deref())?,
        (None, Some(kind)) => {
            let mut s = default_setup(kind, common)?;
            s.name = kind.name().into();
            s.initial_conditions = vec![crate::reductions::InitialCondition {
                label: "custom".into(),
                state: parse_state(args.ic.as_deref().unwrap_or_default(), "--ic")?,
            }];
            s.authoritative = false;
            s.notes = vec!["User-supplied initial state.".into()];
            s
        }
        (None, None) => {
            return Err(CliError::Usage(
                "integrate needs --figure or --reduction with --ic".into(),
            ))
        }
    };
    let kind = setup.reduction;
    let params = common.bindings(kind.system(), &setup.params)?;
    setup.params = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    setup.range = [
        args.from.unwrap_or(setup.range[0]),
        args.to.unwrap_or(setup.range[1]),
    ];
    if let Some(t) = common.tol {
        setup.rel_tol = t;
        setup.abs_tol = t * 1e-2;
    }
    let method = method_of(args.method);
    let step = match (method, args.step) {
        (Method::Dp45, _) => None,
        (_, Some(h)) => Some(h),
        (_, None) => return Err(CliError::Usage("fixed-step methods need --step".into())),
    };
    let sys = PdeSystem::build(kind.system(), Default::default());
    let ode = kind.derive(&sys)?.compile(&params)?;
    let [s0, s1] = setup.range;
    let one = |y0: State| -> Result<Trajectory, CliError> {
        Ok(match step {
            None => integrate_adaptive(&ode, y0, s0, s1, setup.rel_tol, setup.abs_tol)?,
            Some(h) => integrate_fixed(&ode, method, y0, s0, s1, h)?,
        })
    };
    let states: Vec<State> = setup.initial_conditions.iter().map(|ic| ic.state).collect();
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        states.par_iter().map(|y| one(*y)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = states.iter().map(|y| one(*y)).collect();
    let trajectories: Vec<Trajectory> = results.into_iter().collect::<Result<_, _>>()?;

    let indep = kind.ansatz().indep.name();
    let mut files = Vec::new();
    let mut runs = Vec::new();
    for (ic, tr) in setup.initial_conditions.iter().zip(&trajectories) {
        let stem = format!("{}_{}", setup.name, ic.label);
        files.push((PathBuf::from(format!("{stem}.csv")), tr.to_csv(indep)));
        files.push((
            PathBuf::from(format!("{stem}.events.json")),
            to_json(&tr.summary()),
        ));
        runs.push(Run {
            label: &ic.label,
            initial: &ic.state,
            csv: format!("{stem}.csv"),
            summary: tr.summary(),
        });
    }
    let report = to_json(&IntegrateReport {
        setup: &setup,
        method,
        runs,
    });
    Ok(Output {
        report,
        files,
        code: exit::OK,
    })
}

#[derive(Serialize)]
struct ResidualOutput<'a> {
    reduction: ReductionKind,
    solution: &'static str,
    params: BTreeMap<String, String>,
    #[serde(serialize_with = "f17_vec")]
    state: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_exact: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trajectory: Option<TrajectorySummary<'a>>,
    reports: Vec<ResidualReport>,
    #[serde(serialize_with = "orders")]
    orders: Vec<Option<f64>>,
}

fn orders<S: serde::Serializer>(v: &[Option<f64>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct One(Option<f64>);
    impl Serialize for One {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            f17_opt(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&One(*x))?;
    }
    seq.end()
}

/// Observed order between consecutive spacings; `None` when a residual vanishes.
pub fn observed_orders(deltas: &[f64], max: &[f64]) -> Vec<Option<f64>> {
    deltas
        .windows(2)
        .zip(max.windows(2))
        .map(|(d, r)| (r[0] > 0.0 && r[1] > 0.0).then(|| (r[0] / r[1]).ln() / (d[0] / d[1]).ln()))
        .collect()
}

pub(super) fn residual(common: &Common, args: &ResidualArgs) -> Result<Output, CliError> {
    let kind = args.reduction;
    if args.deltas.is_empty() || args.deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(CliError::Usage("--deltas must be positive".into()));
    }
    let setup = default_setup(kind, common)?;
    let mut params = common.bindings(kind.system(), &setup.params)?;
    let sys = PdeSystem::build(kind.system(), Default::default());
    let ansatz = kind.ansatz();
    let sweep = |solution: &Solution,
                 loci,
                 probes: &[[f64; 3]],
                 values: &Bindings|
     -> Result<Vec<ResidualReport>, CliError> {
        args.deltas
            .iter()
            .map(|&d| {
                Ok(reconstruct_residual(
                    &ansatz, solution, &sys, values, loci, d, probes,
                )?)
            })
            .collect()
    };

    let (label, state, exact, summary_tr, reports);
    let trajectory;
    if args.constant {
        label = "constant";
        state = parse_state(args.ic.as_deref().unwrap_or(&[1.0, 0.0, 0.0]), "--ic")?;
        let [a, b] = setup.range;
        let probes: Vec<[f64; 3]> = [0.25, 0.5, 0.75]
            .iter()
            .map(|f| kind.probe_at(a + f * (b - a)))
            .collect();
        reports = sweep(&Solution::Constant(state), None, &probes, &params)?;
        exact = None;
        summary_tr = None;
    } else if kind == ReductionKind::EquatorY2y5 {
        label = "closed_form";
        state = parse_state(args.ic.as_deref().unwrap_or(&[1.0, 0.0, 1.0]), "--ic")?;
        for (n, x) in ["H0", "U0", "V0"].iter().zip(state) {
            params.insert(Symbol::constant(n), x);
        }
        let (_, sol) = equator_y2y5();
        let derived = kind.derive(&sys)?;
        exact = Some(sol.residuals(&derived)?.iter().all(Expr::is_zero));
        let probes: Vec<[f64; 3]> = [1.0, 2.0]
            .iter()
            .flat_map(|&t| [0.0, 1.0].map(move |y| [t, 0.3, y]))
            .collect();
        reports = sweep(
            &Solution::Closed {
                solution: &sol,
                values: &params,
            },
            None,
            &probes,
            &params,
        )?;
        summary_tr = None;
    } else {
        label = "trajectory";
        let y0 = match &args.ic {
            Some(v) => parse_state(v, "--ic")?,
            None => setup.initial_conditions[0].state,
        };
        state = y0;
        let ode = kind.derive(&sys)?.compile(&params)?;
        let (s0, s1) = (
            args.from.unwrap_or(setup.range[0]),
            args.to.unwrap_or(setup.range[1]),
        );
        let rel = common.tol.unwrap_or(1e-11);
        trajectory = integrate_adaptive(&ode, y0, s0, s1, rel, rel * 1e-2)?;
        let (a, b) = trajectory.range();
        let probes: Vec<[f64; 3]> = [0.2, 0.4, 0.6, 0.8]
            .iter()
            .map(|f| kind.probe_at(a + f * (b - a)))
            .collect();
        reports = sweep(
            &Solution::Trajectory(&trajectory),
            Some(&ode),
            &probes,
            &params,
        )?;
        exact = None;
        summary_tr = Some(trajectory.summary());
    }
    let max: Vec<f64> = reports.iter().map(|r| r.max).collect();
    let report = ResidualOutput {
        reduction: kind,
        solution: label,
        params: param_listing(&params),
        state: state.to_vec(),
        closed_form_exact: exact,
        trajectory: summary_tr,
        orders: observed_orders(&args.deltas, &max),
        reports,
    };
    Ok(Output {
        report: to_json(&report),
        files: Vec::new(),
        code: exit::OK,
    })
}
