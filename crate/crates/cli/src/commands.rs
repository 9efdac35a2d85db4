use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{Context, Result};
use halfmap::{
    find_crossing_orbits, oracle_circuit, oracle_half_map, orbit_sample, puiseux_at_hat_y0,
    taylor_infinity, taylor_origin_exact, taylor_origin_shifted, Execution, HalfMap, HalfMapError,
    PowerSeries, PwlHalfMaps, SearchConfig, SolverConfig,
};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::spec::{rational_text, Number, Range, SpecError, System, SystemSpec};
use crate::table::{number, Cell, Table};
use crate::{AnchorArg, Common, Format};

const DEFAULT_ORDER: usize = 6;

fn load(common: &Common) -> Result<SystemSpec> {
    let text = if common.spec.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&common.spec)
            .with_context(|| format!("reading {}", common.spec.display()))?
    };
    Ok(SystemSpec::parse(&text)?)
}

/// Solver settings from `--tol` / the spec and `HALFMAP_MAX_ITERS`.
fn solver(common: &Common, spec: &SystemSpec) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    if let Some(tol) = common.tol.or(spec.options.tol) {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(
                SpecError(format!("--tol must be a non-negative number, got {tol}")).into(),
            );
        }
        cfg.abs_tol = tol;
    }
    if let Ok(v) = std::env::var("HALFMAP_MAX_ITERS") {
        cfg.max_iters = v.trim().parse().map_err(|_| {
            SpecError(format!(
                "HALFMAP_MAX_ITERS must be a positive integer, got \"{v}\""
            ))
        })?;
        if cfg.max_iters == 0 {
            return Err(SpecError("HALFMAP_MAX_ITERS must be positive".into()).into());
        }
    }
    Ok(cfg)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(common: &Common, table: &Table, default: Format) -> Result<()> {
    let text = match common.format.unwrap_or(default) {
        Format::Csv => table.to_csv()?,
        Format::Json => pretty(&table.to_json_value())?,
    };
    write_out(common.out.as_deref(), &text)
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn range_arg(flag: Option<&str>, spec: &SystemSpec) -> Result<Option<Range>> {
    Ok(flag
        .map(str::to_string)
        .or_else(|| spec.options.range.clone())
        .map(|s| s.parse::<Range>())
        .transpose()?)
}

fn grid(r: Range) -> Vec<f64> {
    halfmap::sweep::linspace(r.lo, r.hi, r.steps)
}

fn message(e: &HalfMapError) -> Cell {
    Cell::Text(e.to_string())
}

pub fn eval(common: &Common, y0: &[String], range: Option<&str>, oracle: bool) -> Result<()> {
    let spec = load(common)?;
    let params = spec.zone()?.params()?;
    let map = HalfMap::with_solver(params, solver(common, &spec)?)?;
    let mut points: Vec<f64> = if !y0.is_empty() {
        y0.iter()
            .map(|s| Number::Text(s.clone()).value())
            .collect::<Result<_, _>>()?
    } else if let Some(list) = &spec.options.y0 {
        list.iter().map(Number::value).collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    if let Some(r) = range_arg(range, &spec)? {
        points.extend(grid(r));
    }
    if points.is_empty() {
        return Err(
            SpecError("no evaluation points: give --y0, --range or options.y0".into()).into(),
        );
    }
    let mut headers = vec!["y0", "p", "dp", "d2p", "bisector"];
    if oracle {
        headers.extend(["oracle_p", "deviation"]);
    }
    headers.push("error");
    let mut table = Table::new(headers);
    let rows = halfmap::sweep::map(Execution::default(), &points, |&y| {
        let mut row = vec![Cell::num(y)];
        let p = map.eval(y);
        let mut err = p.as_ref().err().map(message);
        row.push(Cell::opt(p.as_ref().ok().copied()));
        // derivatives only exist away from the tangency; report them as empty there
        row.push(Cell::opt(map.derivative1(y).ok()));
        row.push(Cell::opt(map.derivative2(y).ok()));
        row.push(match map.bisector_position(y) {
            Ok(s) => Cell::Int(s as i64),
            Err(_) => Cell::Empty,
        });
        if oracle {
            match (oracle_half_map(&params, y), &p) {
                (Ok(o), Ok(p)) => {
                    row.push(Cell::num(o));
                    row.push(Cell::num((p - o).abs() / (1.0 + p.abs())));
                }
                (Ok(o), Err(_)) => {
                    row.push(Cell::num(o));
                    row.push(Cell::Empty);
                }
                (Err(e), _) => {
                    row.push(Cell::Empty);
                    row.push(Cell::Empty);
                    err.get_or_insert_with(|| message(&e));
                }
            }
        }
        row.push(err.unwrap_or(Cell::Empty));
        row
    });
    for row in rows {
        table.push(row);
    }
    emit_table(common, &table, Format::Csv)
}

fn anchor_from(spec: &SystemSpec, flag: Option<AnchorArg>) -> Result<AnchorArg> {
    if let Some(a) = flag {
        return Ok(a);
    }
    match spec.options.anchor.as_deref() {
        None | Some("origin") => Ok(AnchorArg::Origin),
        Some("shifted") => Ok(AnchorArg::Shifted),
        Some("puiseux") => Ok(AnchorArg::Puiseux),
        Some("infinity") => Ok(AnchorArg::Infinity),
        Some(other) => Err(SpecError(format!(
            "unknown anchor \"{other}\" (origin, shifted, puiseux, infinity)"
        ))
        .into()),
    }
}

fn exponent_value(e: f64) -> Value {
    number(e)
}

pub fn series(common: &Common, anchor: Option<AnchorArg>, order: Option<usize>) -> Result<()> {
    let spec = load(common)?;
    let zone = spec.zone()?;
    let anchor = anchor_from(&spec, anchor)?;
    let order = order.or(spec.options.order);
    let mut exact = None;
    let series: PowerSeries = match anchor {
        AnchorArg::Origin => {
            let z = zone.exact()?;
            let order = order.unwrap_or(DEFAULT_ORDER);
            let coeffs = taylor_origin_exact(&z.trace, &z.det, &z.offset, order)?;
            let s = PowerSeries {
                anchor: halfmap::Anchor::Origin,
                terms: coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| halfmap::Term {
                        half_exponent: 2 * (k as i32 + 1),
                        coefficient: c.to_f64().unwrap_or(f64::NAN),
                    })
                    .collect(),
            };
            exact = Some(coeffs);
            s
        }
        AnchorArg::Shifted => {
            taylor_origin_shifted(&zone.params()?, order.unwrap_or(DEFAULT_ORDER))?
        }
        AnchorArg::Puiseux => puiseux_at_hat_y0(&zone.params()?, order.unwrap_or(DEFAULT_ORDER))?,
        AnchorArg::Infinity => taylor_infinity(&zone.params()?, order.unwrap_or(4))?,
    };
    let mut headers = vec!["exponent", "coefficient"];
    if exact.is_some() {
        headers.push("exact");
    }
    let mut table = Table::new(headers);
    for (i, t) in series.terms.iter().enumerate() {
        let mut row = vec![Cell::num(t.exponent()), Cell::num(t.coefficient)];
        if let Some(ex) = &exact {
            row.push(Cell::Text(rational_text(&ex[i])));
        }
        table.push(row);
    }
    match common.format.unwrap_or(Format::Json) {
        Format::Csv => write_out(common.out.as_deref(), &table.to_csv()?),
        Format::Json => {
            let terms: Vec<Value> = series
                .terms
                .iter()
                .map(|t| json!([exponent_value(t.exponent()), number(t.coefficient)]))
                .collect();
            let mut doc = json!({
                "anchor": serde_json::to_value(series.anchor)?,
                "terms": terms,
            });
            if let Some(ex) = &exact {
                let exact_terms: Vec<Value> = series
                    .terms
                    .iter()
                    .zip(ex)
                    .map(|(t, q)| json!([exponent_value(t.exponent()), rational_text(q)]))
                    .collect();
                doc["exact"] = Value::Array(exact_terms);
            }
            write_out(common.out.as_deref(), &pretty(&doc)?)
        }
    }
}

pub fn orbits(
    common: &Common,
    oracle: bool,
    samples: Option<&Path>,
    range: Option<&str>,
    no_certificates: bool,
) -> Result<()> {
    let spec = load(common)?;
    let system = spec.pwl()?.system()?;
    let solver_cfg = solver(common, &spec)?;
    let mut config = SearchConfig {
        use_certificates: !no_certificates,
        solver: SolverConfig {
            abs_tol: SolverConfig::default().abs_tol,
            ..solver_cfg
        },
        ..SearchConfig::default()
    };
    if let Some(tol) = common.tol.or(spec.options.tol) {
        config.root_tol = tol;
    }
    let (report, failure) = match find_crossing_orbits(&system, &config) {
        Ok(r) => (r, None),
        Err(HalfMapError::SearchBudgetExceeded { reason, partial }) => {
            let err = HalfMapError::SearchBudgetExceeded {
                reason: reason.clone(),
                partial: partial.clone(),
            };
            (*partial, Some((reason, err)))
        }
        Err(e) => return Err(e.into()),
    };

    if let Some(path) = samples {
        let maps = PwlHalfMaps::with_solver(&system, config.solver)?;
        let r = match range_arg(range, &spec)? {
            Some(r) => Some(r),
            None => maps.common_interval().map(|j| {
                let hi = if j.is_bounded() {
                    j.upper
                } else {
                    j.lower + 10.0 * (1.0 + j.lower.abs())
                };
                Range {
                    lo: j.lower,
                    hi,
                    steps: 200,
                }
            }),
        };
        let mut t = Table::new(vec!["y0", "y_left", "y_right", "displacement"]);
        if let Some(r) = r {
            for y in grid(r) {
                t.push(vec![
                    Cell::num(y),
                    Cell::opt(maps.forward(y).ok()),
                    Cell::opt(maps.backward(y).ok()),
                    Cell::opt(maps.displacement(y).ok()),
                ]);
            }
        }
        write_out(Some(path), &t.to_csv()?)?;
    }

    let closures: Vec<Option<f64>> = if oracle {
        report
            .orbits
            .iter()
            .map(|o| oracle_circuit(&system, o.y0).ok())
            .collect()
    } else {
        Vec::new()
    };

    match common.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut headers = vec!["y0", "y1", "multiplier", "stability", "tangential"];
            if oracle {
                headers.push("oracle_return");
            }
            let mut t = Table::new(headers);
            for (i, o) in report.orbits.iter().enumerate() {
                let mut row = vec![
                    Cell::num(o.y0),
                    Cell::num(o.y1),
                    Cell::num(o.multiplier),
                    Cell::Text(
                        serde_json::to_value(o.stability)?
                            .as_str()
                            .unwrap_or("")
                            .into(),
                    ),
                    Cell::Text(o.tangential.to_string()),
                ];
                if oracle {
                    row.push(Cell::opt(closures[i]));
                }
                t.push(row);
            }
            write_out(common.out.as_deref(), &t.to_csv()?)?;
        }
        Format::Json => {
            let mut doc = serde_json::to_value(&report)?;
            let obj = doc.as_object_mut().expect("report serializes to an object");
            obj.insert("partial".into(), Value::Bool(failure.is_some()));
            if let Some((reason, _)) = &failure {
                obj.insert("reason".into(), Value::from(reason.as_str()));
            }
            if oracle {
                let checks: Vec<Value> = report
                    .orbits
                    .iter()
                    .zip(&closures)
                    .map(|(o, c)| {
                        json!({
                            "y0": number(o.y0),
                            "returned": c.map(number),
                            "deviation": c.map(|c| number((c - o.y0).abs())),
                        })
                    })
                    .collect();
                obj.insert("oracle".into(), Value::Array(checks));
            }
            write_out(common.out.as_deref(), &pretty(&doc)?)?;
        }
    }
    match failure {
        Some((_, err)) => Err(err.into()),
        None => Ok(()),
    }
}

pub fn sample(
    common: &Common,
    range: Option<&str>,
    oracle: bool,
    trace: &[f64],
    traces_out: Option<&Path>,
    trace_points: usize,
) -> Result<()> {
    let spec = load(common)?;
    let r = range_arg(range, &spec)?
        .ok_or_else(|| SpecError("sample needs --range LO:HI:STEPS or options.range".into()))?;
    let ys = grid(r);
    let solver_cfg = solver(common, &spec)?;
    let exec = Execution::default();
    let table = match spec.system() {
        System::Zone(z) => {
            let params = z.params()?;
            let map = HalfMap::with_solver(params, solver_cfg)?;
            let mut headers = vec!["y0", "p"];
            if oracle {
                headers.push("oracle_p");
            }
            let mut t = Table::new(headers);
            for row in halfmap::sweep::map(exec, &ys, |&y| {
                let mut row = vec![Cell::num(y), Cell::opt(map.eval(y).ok())];
                if oracle {
                    row.push(Cell::opt(oracle_half_map(&params, y).ok()));
                }
                row
            }) {
                t.push(row);
            }
            if !trace.is_empty() {
                let path = traces_out
                    .ok_or_else(|| SpecError("--trace needs --traces-out PATH".into()))?;
                let mut tt = Table::new(vec!["y0", "t", "x", "y"]);
                for &y0 in trace {
                    let s = orbit_sample(&params, y0, trace_points)?;
                    for (t, (x, y)) in s.times.iter().zip(&s.states) {
                        tt.push(vec![
                            Cell::num(y0),
                            Cell::num(*t),
                            Cell::num(*x),
                            Cell::num(*y),
                        ]);
                    }
                }
                write_out(Some(path), &tt.to_csv()?)?;
            }
            t
        }
        System::Pwl(p) => {
            if !trace.is_empty() {
                return Err(SpecError("--trace is only available for single zones".into()).into());
            }
            let system = p.system()?;
            let maps = PwlHalfMaps::with_solver(&system, solver_cfg)?;
            let mut headers = vec!["y0", "y_left", "y_right", "displacement"];
            if oracle {
                headers.extend(["oracle_left", "oracle_right"]);
            }
            let mut t = Table::new(headers);
            for row in halfmap::sweep::map(exec, &ys, |&y| {
                let mut row = vec![
                    Cell::num(y),
                    Cell::opt(maps.forward(y).ok()),
                    Cell::opt(maps.backward(y).ok()),
                    Cell::opt(maps.displacement(y).ok()),
                ];
                if oracle {
                    row.push(Cell::opt(halfmap::pwl::oracle_forward_map(&system, y).ok()));
                    row.push(Cell::opt(halfmap::oracle_backward_map(&system, y).ok()));
                }
                row
            }) {
                t.push(row);
            }
            t
        }
    };
    emit_table(common, &table, Format::Csv)
}

fn zone_json(z: &crate::spec::ExactZone) -> Result<Value> {
    let p = z.params()?;
    Ok(json!({
        "trace": number(p.trace),
        "det": number(p.det),
        "offset": number(p.offset),
        "exact": {
            "trace": rational_text(&z.trace),
            "det": rational_text(&z.det),
            "offset": rational_text(&z.offset),
        }
    }))
}

pub fn reduce(common: &Common) -> Result<()> {
    let spec = load(common)?;
    let doc = match spec.system() {
        System::Zone(z) => zone_json(&z.exact()?)?,
        System::Pwl(p) => json!({
            "left": zone_json(&p.left.exact()?)?,
            "right": zone_json(&p.right.exact()?)?,
            "b": number(p.b.value()?),
        }),
    };
    if common.format == Some(Format::Csv) {
        return Err(SpecError("reduce writes JSON only".into()).into());
    }
    write_out(common.out.as_deref(), &pretty(&doc)?)
}
