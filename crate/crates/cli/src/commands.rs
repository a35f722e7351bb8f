use std::fs;
use std::path::PathBuf;

use serde_json::{Map, Value};
use spinglass::amp::empirical_vs_se;
use spinglass::landscape::complexity_s;
use spinglass::numerics::{goe_sample, RngStream};
use spinglass::oracle::{
    check_h_derivative, guerra_rs_bound_mc, mutual_info_immse_check, pd_second_moment_mc, ppp_max_cdf,
    ppp_shift_invariance_mc, ppp_topk,
};
use spinglass::par;
use spinglass::pspin::{k2_phase, m_lower, monasson_curve, psi_rs, solve_rs, Branch, PSpinParams};
use spinglass::sk::{
    er_graph, maxcut_bruteforce, maxcut_localsearch, maxcut_prediction, maxcut_random, minimize_parisi_chain,
    parse_edge_list, reg_graph, sk_psi_rs, sk_solve_rs, write_edge_list, CutResult, PdeGrid, SkParams,
};

use crate::output::{num, Cell, Report, Table};
use crate::{
    AmpArgs, BranchArg, CheckName, Command, ComplexityArgs, Failure, FixedModel, FixedPointArgs, GraphKind, MaxcutArgs,
    MethodArg, MonassonArgs, OracleArgs, ParisiArgs, PhaseDiagramArgs, PhaseModel, Produced, Range,
};

/// Magnitude below which an order parameter is reported as zero.
const ZERO: f64 = 1e-9;

pub fn run(cmd: &Command, seed: u64) -> Result<Produced, Failure> {
    let rng = RngStream::from_seed(seed);
    match cmd {
        Command::PhaseDiagram(a) => phase_diagram(a).map(table),
        Command::FixedPoint(a) => fixed_point(a).map(table),
        Command::Complexity(a) => complexity(a).map(table),
        Command::Monasson(a) => monasson(a).map(table),
        Command::Parisi(a) => parisi(a).map(doc),
        Command::AmpSim(a) => amp(a, &rng).map(table),
        Command::Maxcut(a) => maxcut(a, &rng),
        Command::OracleCheck(a) => oracle(a, &rng),
    }
}

fn table(t: Table) -> Produced {
    Produced {
        report: Report::Table(t),
        extra_files: Vec::new(),
        checks_passed: true,
    }
}

fn doc(d: Map<String, Value>) -> Produced {
    Produced {
        report: Report::Doc(d),
        extra_files: Vec::new(),
        checks_passed: true,
    }
}

fn axis(r: Range, grid: usize, name: &str) -> Result<Vec<f64>, Failure> {
    if r.lo == r.hi {
        return Ok(vec![r.lo]);
    }
    if grid < 2 {
        return Err(Failure::usage(format!(
            "--grid must be >= 2 for the {name} range {}:{}",
            r.lo, r.hi
        )));
    }
    Ok((0..grid)
        .map(|i| r.lo + (r.hi - r.lo) * i as f64 / (grid - 1) as f64)
        .collect())
}

fn phase_diagram(a: &PhaseDiagramArgs) -> Result<Table, Failure> {
    if a.beta.lo < 0.0 || a.lambda.lo < 0.0 {
        return Err(Failure::usage("beta and lambda ranges must be non-negative"));
    }
    let betas = axis(a.beta, a.grid, "beta")?;
    let lambdas = axis(a.lambda, a.grid, "lambda")?;
    let points: Vec<(f64, f64)> = betas
        .iter()
        .flat_map(|&b| lambdas.iter().map(move |&l| (b, l)))
        .collect();
    let model = a.model;
    let rows = par::map_slice(&points, |&(beta, lambda)| -> Result<Vec<Cell>, Failure> {
        let (phase, b, q, psi) = match model {
            PhaseModel::PspinK2 => {
                let (label, p) = k2_phase(beta, lambda);
                let psi = psi_rs(p, &PSpinParams::new(2, beta, lambda, 0.0)?)?;
                (label.short(), p.b, p.q, psi)
            }
            PhaseModel::Sk => {
                let params = SkParams::new(beta, lambda, 0.0)?;
                let p = sk_solve_rs(&params)?;
                let psi = sk_psi_rs(p.b, p.q, &params)?;
                let label = if p.b.abs() > ZERO {
                    "R"
                } else if p.q > ZERO {
                    "SG"
                } else {
                    "P"
                };
                (label, p.b, p.q, psi)
            }
        };
        Ok(vec![
            beta.into(),
            lambda.into(),
            phase.into(),
            b.into(),
            q.into(),
            psi.into(),
        ])
    });
    let mut t = Table::new(vec!["beta", "lambda", "phase", "b", "q", "psi"]);
    for row in rows {
        t.push(row?);
    }
    Ok(t)
}

fn fixed_point(a: &FixedPointArgs) -> Result<Table, Failure> {
    let (k, b, q, psi) = match a.model {
        FixedModel::Pspin => {
            let params = PSpinParams::new(a.k, a.beta, a.lambda, a.h)?;
            let branch = match a.branch {
                BranchArg::Trivial => Branch::Trivial,
                BranchArg::Nontrivial => Branch::Nontrivial,
            };
            let p = solve_rs(&params, branch)?;
            (a.k, p.b, p.q, psi_rs(p, &params)?)
        }
        FixedModel::Sk => {
            let params = SkParams::new(a.beta, a.lambda, a.h)?;
            let p = sk_solve_rs(&params)?;
            (2, p.b, p.q, sk_psi_rs(p.b, p.q, &params)?)
        }
    };
    let model = match a.model {
        FixedModel::Pspin => "pspin",
        FixedModel::Sk => "sk",
    };
    let mut t = Table::new(vec!["model", "k", "beta", "lambda", "h", "b", "q", "psi"]);
    t.push(vec![
        model.into(),
        (k as usize).into(),
        a.beta.into(),
        a.lambda.into(),
        a.h.into(),
        b.into(),
        q.into(),
        psi.into(),
    ]);
    Ok(t)
}

fn complexity(a: &ComplexityArgs) -> Result<Table, Failure> {
    if a.k < 3 {
        return Err(Failure::usage("complexity needs k >= 3"));
    }
    if !(a.x_min < a.x_max) || a.points < 2 {
        return Err(Failure::usage("need x-min < x-max and at least 2 points"));
    }
    let mut t = Table::new(vec!["x", "S"]);
    for i in 0..a.points {
        let x = a.x_min + (a.x_max - a.x_min) * i as f64 / (a.points - 1) as f64;
        t.push(vec![x.into(), complexity_s(x, a.k).into()]);
    }
    Ok(t)
}

fn monasson(a: &MonassonArgs) -> Result<Table, Failure> {
    if a.k < 3 || !(a.temperature > 0.0) || a.m_points < 2 {
        return Err(Failure::usage("monasson needs k >= 3, T > 0 and at least 2 m points"));
    }
    let ml = m_lower(a.temperature, a.k).ok_or_else(|| Failure {
        code: crate::EXIT_NUMERICAL,
        message: format!(
            "no 1RSB solution at T = {} (above the dynamical temperature)",
            a.temperature
        ),
    })?;
    let grid: Vec<f64> = (1..=a.m_points)
        .map(|i| ml + (1.0 - ml) * i as f64 / a.m_points as f64)
        .collect();
    let curve = monasson_curve(a.temperature, a.k, &grid)?;
    let mut t = Table::new(vec!["m", "f", "sigma"]);
    for (m, (f, s)) in curve.m.iter().zip(&curve.samples) {
        t.push(vec![(*m).into(), (*f).into(), (*s).into()]);
    }
    Ok(t)
}

fn parisi(a: &ParisiArgs) -> Result<Map<String, Value>, Failure> {
    if !(a.beta > 0.0) || a.atoms == 0 {
        return Err(Failure::usage("parisi needs beta > 0 and at least one atom"));
    }
    let auto = PdeGrid::for_beta(a.beta);
    let grid = PdeGrid::new(a.x_max.unwrap_or(auto.x_max), a.nx.unwrap_or(auto.nx))?;
    let chain = minimize_parisi_chain(a.atoms, a.beta, &grid)?;
    let (measure, value) = chain.last().expect("non-empty chain");
    let mut d = Map::new();
    d.insert("beta".into(), num(a.beta));
    d.insert("atoms".into(), a.atoms.into());
    let mut g = Map::new();
    g.insert("x_max".into(), num(grid.x_max));
    g.insert("nx".into(), grid.nx.into());
    d.insert("grid".into(), g.into());
    let atoms: Vec<Value> = measure
        .atoms
        .iter()
        .map(|&(q, w)| {
            let mut o = Map::new();
            o.insert("q".into(), num(q));
            o.insert("weight".into(), num(w));
            o.into()
        })
        .collect();
    d.insert("measure".into(), atoms.into());
    d.insert("P".into(), num(*value));
    d.insert("P_over_beta".into(), num(value / a.beta));
    let by_atoms: Vec<Value> = chain
        .iter()
        .enumerate()
        .map(|(i, (_, v))| {
            let mut o = Map::new();
            o.insert("atoms".into(), (i + 1).into());
            o.insert("P".into(), num(*v));
            o.into()
        })
        .collect();
    d.insert("by_atoms".into(), by_atoms.into());
    Ok(d)
}

fn amp(a: &AmpArgs, rng: &RngStream) -> Result<Table, Failure> {
    let r = empirical_vs_se(a.n, a.lambda, a.eps, a.iters, a.reps, rng)?;
    let mut t = Table::new(vec!["t", "a_t", "q_t", "empirical_overlap", "empirical_sqnorm"]);
    for row in &r.rows {
        t.push(vec![
            row.t.into(),
            row.a_t.into(),
            row.q_t.into(),
            row.overlap.into(),
            row.sqnorm.into(),
        ]);
    }
    Ok(t)
}

fn maxcut(a: &MaxcutArgs, rng: &RngStream) -> Result<Produced, Failure> {
    let graph_rng = rng.substream(0);
    let (g, kind) = match a.graph {
        GraphKind::Er => (er_graph(a.n, a.d, &graph_rng)?, "er"),
        GraphKind::Regular => {
            if a.d < 0.0 || a.d.fract() != 0.0 {
                return Err(Failure::usage("regular graphs need an integer degree"));
            }
            (reg_graph(a.n, a.d as usize, &graph_rng)?, "regular")
        }
        GraphKind::File => {
            let path = a
                .input
                .as_ref()
                .ok_or_else(|| Failure::usage("--graph file needs --input"))?;
            let text =
                fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            (parse_edge_list(&text, None)?, "file")
        }
    };
    let method_rng = rng.substream(1);
    let res: CutResult = match a.method {
        MethodArg::Brute => maxcut_bruteforce(&g)?,
        MethodArg::LocalSearch => maxcut_localsearch(&g, a.restarts, &method_rng)?,
        MethodArg::Random => maxcut_random(&g, &method_rng),
    };
    let n = g.n as f64;
    let d_realized = if g.n > 0 { 2.0 * g.edges.len() as f64 / n } else { 0.0 };
    let d_pred = if matches!(a.graph, GraphKind::File) {
        d_realized
    } else {
        a.d
    };
    let mut d = Map::new();
    let mut gd = Map::new();
    gd.insert("kind".into(), kind.into());
    gd.insert("n".into(), g.n.into());
    gd.insert("edges".into(), g.edges.len().into());
    gd.insert("d".into(), num(d_pred));
    gd.insert("d_realized".into(), num(d_realized));
    d.insert("graph".into(), gd.into());
    d.insert("method".into(), serde_json::to_value(res.method).expect("serialisable"));
    d.insert("cut_value".into(), res.cut_value.into());
    d.insert("cut_per_vertex".into(), num(res.cut_value as f64 / n));
    d.insert("prediction_per_vertex".into(), num(maxcut_prediction(d_pred)));
    d.insert(
        "assignment".into(),
        res.assignment
            .iter()
            .map(|&s| Value::from(s))
            .collect::<Vec<_>>()
            .into(),
    );
    let extra_files: Vec<(PathBuf, String)> = a.write_graph.iter().map(|p| (p.clone(), write_edge_list(&g))).collect();
    Ok(Produced {
        report: Report::Doc(d),
        extra_files,
        checks_passed: true,
    })
}

fn oracle(a: &OracleArgs, rng: &RngStream) -> Result<Produced, Failure> {
    let mut d = Map::new();
    let pass = match a.check {
        CheckName::Guerra => {
            let (n, beta, reps) = (a.n.unwrap_or(14), a.beta.unwrap_or(1.5), a.reps.unwrap_or(200));
            let c = guerra_rs_bound_mc(n, beta, reps, rng)?;
            d.insert("check".into(), "guerra".into());
            d.insert("n".into(), n.into());
            d.insert("beta".into(), num(beta));
            d.insert("reps".into(), reps.into());
            d.insert("mean_phi".into(), num(c.mean_phi));
            d.insert("std_error".into(), num(c.std_error));
            d.insert("bound".into(), num(c.bound));
            d.insert("margin_se".into(), num(c.margin_se));
            c.mean_phi <= c.bound + 3.0 * c.std_error
        }
        CheckName::HDerivative => {
            let n = a.n.unwrap_or(12);
            let params = SkParams::new(a.beta.unwrap_or(1.2), a.lambda.unwrap_or(1.2), a.h.unwrap_or(0.1))?;
            let x0 = rng.substream(0).signs(n);
            let w = goe_sample(n.max(1), &rng.substream(1))?;
            let dev = check_h_derivative(&w, &params, &x0)?;
            d.insert("check".into(), "h-derivative".into());
            d.insert("n".into(), n.into());
            d.insert("beta".into(), num(params.beta));
            d.insert("lambda".into(), num(params.lambda));
            d.insert("h".into(), num(params.h));
            d.insert("deviation".into(), num(dev));
            d.insert("tolerance".into(), num(1e-8));
            dev <= 1e-8
        }
        CheckName::Immse => {
            let (n, lambda, reps) = (a.n.unwrap_or(10), a.lambda.unwrap_or(1.0), a.reps.unwrap_or(2000));
            let c = mutual_info_immse_check(n, lambda, reps, rng)?;
            d.insert("check".into(), "immse".into());
            d.insert("n".into(), n.into());
            d.insert("lambda".into(), num(lambda));
            d.insert("reps".into(), reps.into());
            d.insert("lhs".into(), num(c.lhs));
            d.insert("rhs".into(), num(c.rhs));
            d.insert("std_error".into(), num(c.std_error));
            c.passes(3.0)
        }
        CheckName::PdWeights => {
            let (m, k, reps) = (a.m.unwrap_or(0.5), a.points.unwrap_or(10_000), a.reps.unwrap_or(10_000));
            let (est, se) = pd_second_moment_mc(m, k, reps, rng)?;
            d.insert("check".into(), "pd-weights".into());
            d.insert("m".into(), num(m));
            d.insert("points".into(), k.into());
            d.insert("reps".into(), reps.into());
            d.insert("estimate".into(), num(est));
            d.insert("std_error".into(), num(se));
            d.insert("expected".into(), num(1.0 - m));
            (est - (1.0 - m)).abs() <= 3.0 * se
        }
        CheckName::PppShift => {
            let (m, sigma) = (a.m.unwrap_or(0.5), a.sigma.unwrap_or(1.0));
            let (k, reps) = (a.points.unwrap_or(10_000), a.reps.unwrap_or(10_000));
            let c = ppp_shift_invariance_mc(m, sigma, k, reps, rng)?;
            d.insert("check".into(), "ppp-shift".into());
            d.insert("m".into(), num(m));
            d.insert("sigma".into(), num(sigma));
            d.insert("points".into(), k.into());
            d.insert("reps".into(), reps.into());
            d.insert("lhs".into(), num(c.lhs));
            d.insert("rhs".into(), num(c.rhs));
            d.insert("std_error".into(), num(c.std_error));
            (c.lhs - c.rhs).abs() <= 0.02
        }
        CheckName::PppMax => {
            let (m, reps) = (a.m.unwrap_or(0.5), a.reps.unwrap_or(100_000));
            if reps == 0 {
                return Err(Failure::usage("--reps must be positive"));
            }
            let maxima = par::map_indices(reps, |r| ppp_topk(m, 1, &rng.substream(r as u64)).map(|s| s.points[0]));
            let mut xs = maxima.into_iter().collect::<Result<Vec<_>, _>>()?;
            xs.sort_by(f64::total_cmp);
            let nf = reps as f64;
            let ks = xs
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let f = ppp_max_cdf(t, m);
                    (f - i as f64 / nf).abs().max((f - (i + 1) as f64 / nf).abs())
                })
                .fold(0.0, f64::max);
            d.insert("check".into(), "ppp-max".into());
            d.insert("m".into(), num(m));
            d.insert("reps".into(), reps.into());
            d.insert("ks_distance".into(), num(ks));
            d.insert("tolerance".into(), num(0.01));
            ks <= 0.01
        }
    };
    d.insert("pass".into(), pass.into());
    d.insert("verdict".into(), if pass { "pass" } else { "fail" }.into());
    Ok(Produced {
        report: Report::Doc(d),
        extra_files: Vec::new(),
        checks_passed: pass,
    })
}
