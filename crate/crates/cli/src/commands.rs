use std::fmt::Write as _;

use modwalk::chains::{
    sample_stationary_w, sample_stationary_x, sample_stationary_y, simulate_u, simulate_v,
    simulate_w, simulate_x, simulate_y, simulate_z, BoundaryTrajectory, PlaneTrajectory,
    StationaryBatch,
};
use modwalk::minkowski::qmark_bracket;
use modwalk::stats::{
    exact_distribution_w, exact_distribution_x, fourier_coefficient, ks_distance,
    EmpiricalDistribution, FiniteDistribution, Reference,
};
use modwalk::tiling::{cayley_ball, reduce_to_fundamental, reduce_to_fundamental_f64};
use modwalk::{
    chi_half, lambda_survival, qmark, qmark_inverse, DyadicRational, ExtendedRational, FloatPoint,
    Mode, UpperHalfPoint, WalkConfig,
};
use serde_json::{json, Value};

use crate::{
    Chain, EnumerateArgs, EvalArgs, EvalFn, Failure, FourierArgs, GraphArgs, GraphFormat, KsArgs,
    ModeArg, ReduceArgs, SimulateArgs, TableFormat, TextFormat,
};

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn rational(s: &str) -> Result<ExtendedRational, Failure> {
    Ok(s.parse::<ExtendedRational>()?)
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn chain_name(c: Chain) -> &'static str {
    match c {
        Chain::X => "X",
        Chain::Y => "Y",
        Chain::Z => "Z",
        Chain::V => "V",
        Chain::W => "W",
        Chain::U => "U",
        Chain::StationaryW => "stationary-W",
        Chain::StationaryY => "stationary-Y",
        Chain::StationaryX => "stationary-X",
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn plane_start(a: &SimulateArgs) -> Result<UpperHalfPoint, Failure> {
    if a.start.is_some() {
        return Err(invalid("chains Z and V start from --start-re/--start-im, not --start"));
    }
    let re = rational(a.start_re.as_deref().unwrap_or("0"))?;
    let im = rational(a.start_im.as_deref().unwrap_or("1"))?;
    Ok(UpperHalfPoint::from_parts(&re, &im)?)
}

fn boundary_start(a: &SimulateArgs) -> Result<ExtendedRational, Failure> {
    if a.start_re.is_some() || a.start_im.is_some() {
        return Err(invalid(format!(
            "chain {} starts from --start, not --start-re/--start-im",
            chain_name(a.chain)
        )));
    }
    rational(a.start.as_deref().unwrap_or("0"))
}

enum Simulated {
    Boundary(Vec<BoundaryTrajectory>),
    Plane(Vec<PlaneTrajectory>),
    Stationary(StationaryBatch),
}

pub fn simulate(a: &SimulateArgs) -> Result<String, Failure> {
    let plane = matches!(a.chain, Chain::Z | Chain::V);
    let stationary = matches!(a.chain, Chain::StationaryW | Chain::StationaryY | Chain::StationaryX);
    let m = mode(a.mode.unwrap_or(if plane { ModeArg::Float } else { ModeArg::Exact }));
    if a.trajectories == 0 {
        return Err(invalid("--trajectories must be positive"));
    }
    if stationary && (a.start.is_some() || a.start_re.is_some() || a.start_im.is_some()) {
        return Err(invalid("stationary samplers take no start value"));
    }
    let cfg = WalkConfig::new(a.seed, a.steps, a.trajectories, m);
    let result = match a.chain {
        Chain::X => Simulated::Boundary(simulate_x(&boundary_start(a)?, &cfg)),
        Chain::Y => Simulated::Boundary(simulate_y(&boundary_start(a)?, &cfg)),
        Chain::W => Simulated::Boundary(simulate_w(&boundary_start(a)?, &cfg)?),
        Chain::U => Simulated::Boundary(simulate_u(&boundary_start(a)?, &cfg)?),
        Chain::Z => Simulated::Plane(simulate_z(&plane_start(a)?, &cfg)),
        Chain::V => Simulated::Plane(simulate_v(&plane_start(a)?, &cfg)),
        Chain::StationaryW => Simulated::Stationary(sample_stationary_w(&cfg, a.depth)?),
        Chain::StationaryY => Simulated::Stationary(sample_stationary_y(&cfg, a.depth)?),
        Chain::StationaryX => Simulated::Stationary(sample_stationary_x(&cfg, a.depth)?),
    };
    Ok(match a.format {
        TableFormat::Csv => simulate_csv(&result),
        TableFormat::Json => json_text(&simulate_json(a, m, &result)),
    })
}

fn simulate_csv(result: &Simulated) -> String {
    let mut out = String::from("trajectory,step,value\n");
    match result {
        Simulated::Boundary(runs) => {
            for (j, t) in runs.iter().enumerate() {
                for (k, v) in t.values.iter().enumerate() {
                    writeln!(out, "{j},{k},{v}").unwrap();
                }
            }
        }
        Simulated::Plane(runs) => {
            for (j, t) in runs.iter().enumerate() {
                for (k, v) in t.values.iter().enumerate() {
                    writeln!(out, "{j},{k},{v}").unwrap();
                }
            }
        }
        Simulated::Stationary(batch) => {
            for (j, v) in batch.samples.iter().enumerate() {
                writeln!(out, "{j},0,{v}").unwrap();
            }
        }
    }
    out
}

fn simulate_json(a: &SimulateArgs, m: Mode, result: &Simulated) -> Value {
    let strings = |vals: &mut dyn Iterator<Item = String>| vals.collect::<Vec<_>>();
    let body = match result {
        Simulated::Boundary(runs) => json!({
            "trajectories": runs.iter().map(|t| json!({
                "values": strings(&mut t.values.iter().map(ToString::to_string)),
                "exact_from": t.exact_from,
            })).collect::<Vec<_>>(),
        }),
        Simulated::Plane(runs) => json!({
            "trajectories": runs.iter().map(|t| json!({
                "values": strings(&mut t.values.iter().map(ToString::to_string)),
                "underflow_at": t.underflow_at,
            })).collect::<Vec<_>>(),
        }),
        Simulated::Stationary(batch) => json!({
            "depth": batch.depth,
            "truncation_bound": batch.truncation_bound,
            "samples": strings(&mut batch.samples.iter().map(ToString::to_string)),
        }),
    };
    let mut v = json!({
        "chain": chain_name(a.chain),
        "seed": a.seed,
        "steps": a.steps,
        "mode": mode_name(m),
    });
    v.as_object_mut().unwrap().extend(body.as_object().unwrap().clone());
    v
}

fn dyadic_fields(d: &DyadicRational) -> Value {
    json!({
        "value": d.to_rational().to_string(),
        "dyadic": d.to_string(),
        "decimal": d.to_f64(),
    })
}

fn dyadic_text(d: &DyadicRational) -> String {
    format!("{}\n{}\n{}\n", d.to_rational(), d, d.to_f64())
}

fn required_x(a: &EvalArgs) -> Result<ExtendedRational, Failure> {
    rational(a.x.as_deref().ok_or_else(|| invalid("--x is required"))?)
}

pub fn eval(a: &EvalArgs) -> Result<String, Failure> {
    let name = format!("{:?}", a.function).to_lowercase();
    let (text, fields) = match a.function {
        EvalFn::Qmark | EvalFn::Chi | EvalFn::Lambda => {
            let x = required_x(a)?;
            let d = match a.function {
                EvalFn::Qmark => qmark(&x)?,
                EvalFn::Chi => chi_half(&x)?,
                _ => lambda_survival(&x)?,
            };
            (dyadic_text(&d), dyadic_fields(&d))
        }
        EvalFn::QmarkInverse => {
            let x = required_x(a)?;
            let d = DyadicRational::try_from_rational(&x)?;
            let y = qmark_inverse(&d)?;
            let cf = modwalk::cfrac::expand(&y)?;
            (
                format!("{y}\n{cf}\n{}\n", y.to_f64()),
                json!({"value": y.to_string(), "continued_fraction": cf.to_string(), "decimal": y.to_f64()}),
            )
        }
        EvalFn::Cf => {
            let x = required_x(a)?;
            let cf = modwalk::cfrac::expand(&x)?;
            let convergents: Vec<String> = cf.convergents().iter().map(ToString::to_string).collect();
            (
                format!("{cf}\n{}\n", convergents.join(" ")),
                json!({
                    "continued_fraction": serde_json::from_str::<Value>(&cf.to_json()).expect("valid json"),
                    "convergents": convergents,
                }),
            )
        }
        EvalFn::Bracket => {
            let prefix: Vec<u64> = a
                .prefix
                .as_deref()
                .ok_or_else(|| invalid("--prefix is required"))?
                .split(',')
                .map(|k| k.trim().parse().map_err(|_| invalid(format!("bad partial quotient {k:?}"))))
                .collect::<Result<_, _>>()?;
            let b = qmark_bracket(&prefix)?;
            (
                format!("[{}, {}]\n[{}, {}]\n", b.lo.to_rational(), b.hi.to_rational(), b.lo.to_f64(), b.hi.to_f64()),
                json!({"lo": dyadic_fields(&b.lo), "hi": dyadic_fields(&b.hi)}),
            )
        }
    };
    Ok(match a.format {
        TextFormat::Text => text,
        TextFormat::Json => {
            let mut v = json!({"fn": name, "x": a.x, "prefix": a.prefix});
            v.as_object_mut().unwrap().extend(fields.as_object().unwrap().clone());
            json_text(&v)
        }
    })
}

pub fn ks_test(a: &KsArgs) -> Result<String, Failure> {
    let reference: Reference = a.against.parse()?;
    if a.trajectories == 0 {
        return Err(invalid("--trajectories must be positive"));
    }
    let cfg = WalkConfig::new(a.seed, a.steps, a.trajectories, mode(a.mode));
    let start = || rational(a.start.as_deref().unwrap_or("2/3"));
    let samples = match a.chain {
        Chain::W => simulate_w(&start()?, &cfg)?.into_iter().map(|t| t.last().clone()).collect(),
        Chain::X => simulate_x(&start()?, &cfg).into_iter().map(|t| t.last().clone()).collect(),
        Chain::Y => simulate_y(&start()?, &cfg).into_iter().map(|t| t.last().clone()).collect(),
        Chain::U => simulate_u(&start()?, &cfg)?.into_iter().map(|t| t.last().clone()).collect(),
        Chain::StationaryW => sample_stationary_w(&cfg, a.depth)?.samples,
        Chain::StationaryY => sample_stationary_y(&cfg, a.depth)?.samples,
        Chain::StationaryX => sample_stationary_x(&cfg, a.depth)?.samples,
        Chain::Z | Chain::V => return Err(invalid("ks-test needs a boundary or interval chain")),
    };
    let ks = ks_distance(&EmpiricalDistribution::from_values(&samples)?, reference)?;
    let verdict = if ks.statistic <= a.threshold { "PASS" } else { "FAIL" };
    Ok(format!(
        "chain={} steps={} trajectories={} seed={} against={}\nstatistic={:.16e}\nthreshold={}\nresult={verdict}\n",
        chain_name(a.chain),
        a.steps,
        ks.count,
        a.seed,
        ks.reference,
        ks.statistic,
        a.threshold,
    ))
}

pub fn graph(a: &GraphArgs) -> Result<String, Failure> {
    let g = cayley_ball(a.radius)?;
    Ok(match a.format {
        GraphFormat::Dot => g.to_dot(),
        GraphFormat::Json => g.to_json() + "\n",
    })
}

pub fn reduce(a: &ReduceArgs) -> Result<String, Failure> {
    let (re, im) = (&a.point[0], &a.point[1]);
    match (re.parse::<ExtendedRational>(), im.parse::<ExtendedRational>()) {
        (Ok(x), Ok(y)) => {
            let r = reduce_to_fundamental(&UpperHalfPoint::from_parts(&x, &y)?);
            Ok(format!("tile={}\npoint={}\nboundary={}\n", r.tile.label(), r.point, r.on_boundary))
        }
        _ => {
            let parse = |s: &String| s.parse::<f64>().map_err(|_| invalid(format!("cannot parse {s:?} as a number")));
            let z = FloatPoint::new(parse(re)?, parse(im)?)?;
            let r = reduce_to_fundamental_f64(z)?;
            Ok(format!("tile={}\npoint={}\nboundary={}\n", r.tile.label(), r.point, r.on_boundary))
        }
    }
}

pub fn fourier(a: &FourierArgs) -> Result<String, Failure> {
    if a.samples == 0 || a.n_max < 0 {
        return Err(invalid("--samples must be positive and --n-max non-negative"));
    }
    let cfg = WalkConfig::new(a.seed, 0, a.samples, Mode::Float);
    let batch = sample_stationary_w(&cfg, a.depth)?;
    let emp = EmpiricalDistribution::from_f64(batch.float_samples())?;
    let mut out = String::from("n,re,im,modulus\n");
    for n in 0..=a.n_max {
        let c = fourier_coefficient(n, &emp);
        writeln!(out, "{n},{:.16e},{:.16e},{:.16e}", c.re, c.im, c.norm()).unwrap();
    }
    Ok(out)
}

fn distribution_text(d: &FiniteDistribution, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => {
            let mut out = String::from("value,weight\n");
            for (x, w) in d.atoms() {
                writeln!(out, "{x},{w}").unwrap();
            }
            out
        }
        TableFormat::Json => json_text(&Value::Array(
            d.atoms()
                .iter()
                .map(|(x, w)| json!({"value": x.to_string(), "weight": w.to_string()}))
                .collect(),
        )),
    }
}

pub fn enumerate(a: &EnumerateArgs) -> Result<String, Failure> {
    let start = rational(&a.start)?;
    let d = match a.chain {
        Chain::W => exact_distribution_w(&start, a.steps)?,
        Chain::X => exact_distribution_x(&start, a.steps)?,
        other => return Err(invalid(format!("enumerate supports X and W, not {}", chain_name(other)))),
    };
    Ok(distribution_text(&d, a.format))
}
