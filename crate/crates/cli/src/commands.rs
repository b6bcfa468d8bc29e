use std::path::Path;

use serde_json::{json, Value};

use holder::centroid::{
    hd_centroid, hd_centroid_left, holder_information, hpd_centroid, hpd_centroid_left, sym_hd_centroid,
    sym_hpd_centroid, WeightedSet,
};
use holder::closed_form::{
    cs_closed, escort_divergence, hd_closed, hpd_closed, skew_bhattacharyya_closed, sym_hd_closed, sym_hpd_closed,
};
use holder::clustering::{accuracy, generate_toy_dataset, kmeans_with_rng, run_experiment, ToyDatasetConfig};
use holder::grid::{gaussian_grid, simplex_grid, GridSpec, GridTable};
use holder::mixture::{hpd_mixture_bounds, Mixture, PartitionSettings};
use holder::oracle::{cs_direct, hd_direct, hpd_direct, skew_bhattacharyya_direct, ConjugatePair, Density};
use holder::sampling::Rng;
use holder::{DistributionJson, NaturalParameter, SourceParameter};

use crate::output::{csv_number, csv_table, json_text, num, CliError, CliResult};
use crate::{BoundsArgs, CentroidArgs, CentroidVariant, ClusterArgs, DivArgs, DivVariant, Figure, GridArgs, Table1Args};

fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(format!("{}: {e}", path.display())))
}

fn parse_distribution(v: &Value, what: &str) -> CliResult<NaturalParameter> {
    let d: DistributionJson = serde_json::from_value(v.clone())
        .map_err(|e| CliError::Json(format!("{what} is not a distribution object: {e}")))?;
    Ok(d.to_natural()?)
}

/// Distribution list from either a bare array or {"distributions": [...], "weights": [...]}.
fn parse_set(v: &Value) -> CliResult<(Vec<NaturalParameter>, Option<Vec<f64>>)> {
    let (items, weights) = match v {
        Value::Array(items) => (items, None),
        Value::Object(map) => {
            let items = map
                .get("distributions")
                .and_then(Value::as_array)
                .ok_or_else(|| CliError::Json("expected a \"distributions\" array".into()))?;
            let weights = match map.get("weights") {
                None | Some(Value::Null) => None,
                Some(w) => Some(
                    serde_json::from_value::<Vec<f64>>(w.clone())
                        .map_err(|e| CliError::Json(format!("weights: {e}")))?,
                ),
            };
            (items, weights)
        }
        _ => return Err(CliError::Json("expected an array or an object of distributions".into())),
    };
    let thetas = items
        .iter()
        .enumerate()
        .map(|(i, d)| parse_distribution(d, &format!("distribution {i}")))
        .collect::<CliResult<Vec<_>>>()?;
    Ok((thetas, weights))
}

fn forward_pair(alpha: Option<f64>, context: &str) -> CliResult<ConjugatePair> {
    let alpha = alpha.ok_or_else(|| CliError::Usage(format!("{context} requires --alpha")))?;
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(CliError::Usage(format!("{context} requires a finite --alpha > 1, got {alpha}")));
    }
    Ok(ConjugatePair::forward(alpha)?)
}

fn positive_gamma(gamma: Option<f64>, context: &str) -> CliResult<f64> {
    let gamma = gamma.ok_or_else(|| CliError::Usage(format!("{context} requires --gamma")))?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CliError::Usage(format!("{context} requires a finite --gamma > 0, got {gamma}")));
    }
    Ok(gamma)
}

fn source_json(theta: &NaturalParameter) -> CliResult<Value> {
    let s = SourceParameter::from_natural(theta)?;
    serde_json::to_value(s).map_err(|e| CliError::Json(e.to_string()))
}

pub fn div(args: &DivArgs) -> CliResult<String> {
    let context = format!("--variant {}", variant_name(args.variant));
    // flags first, input second
    let (pair, gamma) = match args.variant {
        DivVariant::Hd | DivVariant::SymHd => {
            (Some(forward_pair(args.alpha, &context)?), Some(positive_gamma(args.gamma, &context)?))
        }
        DivVariant::Hpd | DivVariant::SymHpd | DivVariant::Escort => (Some(forward_pair(args.alpha, &context)?), None),
        DivVariant::Bhat => (Some(forward_pair(Some(args.alpha.unwrap_or(2.0)), &context)?), None),
        DivVariant::Cs => (Some(ConjugatePair::forward(2.0)?), None),
    };
    let pair = pair.expect("every variant sets an exponent pair");

    let input = read_json(&args.input)?;
    let (p, q) = match &input {
        Value::Array(items) if items.len() == 2 => (&items[0], &items[1]),
        Value::Object(map) if map.contains_key("p") && map.contains_key("q") => (&map["p"], &map["q"]),
        _ => return Err(CliError::Json("expected {\"p\": ..., \"q\": ...} or a two-element array".into())),
    };
    let (p, q) = (parse_distribution(p, "p")?, parse_distribution(q, "q")?);

    let alpha = pair.alpha();
    let value = match args.variant {
        DivVariant::Hpd => hpd_closed(&p, &q, pair)?,
        DivVariant::Hd => hd_closed(&p, &q, pair, gamma.unwrap())?,
        DivVariant::SymHpd => sym_hpd_closed(&p, &q, pair)?,
        DivVariant::SymHd => sym_hd_closed(&p, &q, pair, gamma.unwrap())?,
        DivVariant::Cs => cs_closed(&p, &q)?,
        DivVariant::Escort => escort_divergence(&p, &q, pair)?,
        DivVariant::Bhat => skew_bhattacharyya_closed(&p, &q, 1.0 / alpha)?,
    };
    let mut out = json!({
        "value": num(value),
        "variant": variant_name(args.variant),
        "alpha": num(alpha),
        "gamma": gamma.map(num).unwrap_or(Value::Null),
    });
    if args.oracle {
        let (dp, dq) = (Density::from_natural(&p)?, Density::from_natural(&q)?);
        let oracle = match args.variant {
            DivVariant::Hpd => hpd_direct(&dp, &dq, pair)?,
            DivVariant::Hd => hd_direct(&dp, &dq, pair, gamma.unwrap())?,
            DivVariant::SymHpd => 0.5 * (hpd_direct(&dp, &dq, pair)? + hpd_direct(&dq, &dp, pair)?),
            DivVariant::SymHd => {
                let g = gamma.unwrap();
                0.5 * (hd_direct(&dp, &dq, pair, g)? + hd_direct(&dq, &dp, pair, g)?)
            }
            DivVariant::Cs => cs_direct(&dp, &dq)?,
            DivVariant::Escort => {
                let ep = Density::from_natural(&p.escort(alpha)?)?;
                let eq = Density::from_natural(&q.escort(pair.beta())?)?;
                hpd_direct(&ep, &eq, pair)?
            }
            DivVariant::Bhat => skew_bhattacharyya_direct(&dp, &dq, 1.0 / alpha)?,
        };
        out["oracle_value"] = num(oracle);
    }
    Ok(json_text(&out))
}

fn variant_name(v: DivVariant) -> &'static str {
    match v {
        DivVariant::Hpd => "hpd",
        DivVariant::Hd => "hd",
        DivVariant::SymHpd => "sym-hpd",
        DivVariant::SymHd => "sym-hd",
        DivVariant::Cs => "cs",
        DivVariant::Escort => "escort",
        DivVariant::Bhat => "bhat",
    }
}

pub fn centroid(args: &CentroidArgs) -> CliResult<String> {
    use CentroidVariant::*;
    let name = match args.variant {
        Hpd => "hpd",
        Hd => "hd",
        SymHpd => "sym-hpd",
        SymHd => "sym-hd",
        LeftHpd => "left-hpd",
        LeftHd => "left-hd",
    };
    let context = format!("--variant {name}");
    let pair = forward_pair(Some(args.alpha), &context)?;
    let gamma = match args.variant {
        Hd | SymHd | LeftHd => Some(positive_gamma(args.gamma, &context)?),
        _ => None,
    };
    let (thetas, weights) = parse_set(&read_json(&args.input)?)?;
    let set = match weights {
        Some(w) => WeightedSet::new(thetas, w)?,
        None => WeightedSet::uniform(thetas)?,
    };
    let alpha = pair.alpha();
    let result = match args.variant {
        Hpd => hpd_centroid(&set, alpha)?,
        Hd => hd_centroid(&set, alpha, gamma.unwrap())?,
        SymHpd => sym_hpd_centroid(&set, alpha)?,
        SymHd => sym_hd_centroid(&set, alpha, gamma.unwrap())?,
        LeftHpd => hpd_centroid_left(&set, alpha)?,
        LeftHd => hd_centroid_left(&set, alpha, gamma.unwrap())?,
    };
    let mut out = json!({
        "variant": name,
        "alpha": num(alpha),
        "gamma": gamma.map(num).unwrap_or(Value::Null),
        "centroid": source_json(&result.centroid)?,
        "natural": result.centroid.coords().iter().copied().map(num).collect::<Vec<_>>(),
        "converged": result.trace.converged,
        "iterations": result.trace.iterations,
        "energies": result.trace.energies.iter().copied().map(num).collect::<Vec<_>>(),
    });
    if let (SymHd, Some(g)) = (args.variant, gamma) {
        out["holder_information"] = num(holder_information(&set, alpha, g, &result.centroid)?);
    }
    Ok(json_text(&out))
}

pub fn cluster(args: &ClusterArgs) -> CliResult<String> {
    forward_pair(Some(args.alpha), "cluster")?;
    positive_gamma(Some(args.gamma), "cluster")?;
    if args.clusters == 0 {
        return Err(CliError::Usage("--clusters must be at least 1".into()));
    }
    let (points, truth) = match (&args.input, args.toy) {
        (Some(path), None) => (parse_set(&read_json(path)?)?.0, None),
        (None, Some(n)) => {
            let data = generate_toy_dataset(&ToyDatasetConfig::new(n, args.seed))?;
            (data.naturals()?, Some(data.true_labels))
        }
        _ => return Err(CliError::Usage("give exactly one of --input and --toy".into())),
    };
    // stream 0 generated the toy data; the clustering draws from stream 1
    let mut rng = Rng::stream(args.seed, 1);
    let state = kmeans_with_rng(&points, args.clusters, args.alpha, args.gamma, &mut rng)?;
    let centers = state.centers.iter().map(source_json).collect::<CliResult<Vec<_>>>()?;
    let mut out = json!({
        "alpha": num(args.alpha),
        "gamma": num(args.gamma),
        "seed": args.seed,
        "labels": state.labels,
        "energy": num(state.energy),
        "energies": state.energies.iter().copied().map(num).collect::<Vec<_>>(),
        "iterations": state.iterations,
        "converged": state.converged,
        "centers": centers,
    });
    if let Some(truth) = truth {
        if args.clusters == 2 {
            out["accuracy"] = num(accuracy(&state.labels, &truth)?);
        }
        out["true_labels"] = json!(truth);
    }
    Ok(json_text(&out))
}

pub fn table1(args: &Table1Args) -> CliResult<String> {
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    if let Some(n) = args.sizes.iter().find(|n| **n < 2) {
        return Err(CliError::Usage(format!("sample size {n} is below 2")));
    }
    for &a in &args.alphas {
        forward_pair(Some(a), "table1")?;
    }
    let mut header = vec!["n".to_string()];
    header.extend(args.alphas.iter().map(|a| format!("alpha=gamma={a}")));
    let mut rows = Vec::new();
    for &n in &args.sizes {
        let mut row = vec![n.to_string()];
        for &a in &args.alphas {
            let s = run_experiment(n, a, a, args.runs, args.seed)?;
            row.push(format!(
                "{}±{}",
                csv_number(100.0 * s.mean_accuracy),
                csv_number(100.0 * s.std_accuracy)
            ));
        }
        rows.push(row);
    }
    csv_table(&header, rows)
}

fn parse_number(token: &str) -> CliResult<f64> {
    let token = token.trim();
    let bad = || CliError::Usage(format!("cannot parse number {token:?}"));
    match token.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            Ok(a / b)
        }
        None => token.parse().map_err(|_| bad()),
    }
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(parse_number).collect()
}

fn parse_range(s: &str, flag: &str) -> CliResult<(f64, f64)> {
    match parse_list(s)?.as_slice() {
        [lo, hi] => Ok((*lo, *hi)),
        _ => Err(CliError::Usage(format!("{flag} expects lo,hi"))),
    }
}

pub fn grid(args: &GridArgs) -> CliResult<String> {
    let spec = GridSpec {
        alphas: args.alpha_list.clone(),
        gammas: args.gamma_list.clone(),
        hd_alpha: args.hd_alpha,
        resolution: args.resolution,
    };
    let table: GridTable = match args.figure {
        Figure::Simplex => {
            let reference = parse_list(args.reference.as_deref().unwrap_or("1/3,1/3,1/3"))?;
            // exact thirds do not sum to one in floating point; renormalize tiny drift
            let total: f64 = reference.iter().sum();
            let reference: Vec<f64> = if (total - 1.0).abs() < 1e-9 {
                reference.iter().map(|x| x / total).collect()
            } else {
                reference
            };
            simplex_grid(&reference, &spec)?
        }
        Figure::Gaussian => {
            let reference = parse_list(args.reference.as_deref().unwrap_or("0,1"))?;
            let [mean, sd] = reference.as_slice() else {
                return Err(CliError::Usage("gaussian --reference expects mean,sd".into()));
            };
            gaussian_grid(
                *mean,
                *sd,
                parse_range(&args.mu_range, "--mu-range")?,
                parse_range(&args.sigma_range, "--sigma-range")?,
                &spec,
            )?
        }
    };
    csv_table(
        &table.columns,
        table.rows.iter().map(|r| r.iter().copied().map(csv_number).collect()),
    )
}

pub fn bounds(args: &BoundsArgs) -> CliResult<String> {
    let pair = forward_pair(Some(args.alpha), "bounds")?;
    let m = Mixture::from_json(&read_json(&args.m)?)?;
    let n = Mixture::from_json(&read_json(&args.n)?)?;
    let b = hpd_mixture_bounds(&m, &n, pair, PartitionSettings { resolution: args.resolution })?;
    let reference = hpd_direct(&m.density()?, &n.density()?, pair)?;
    Ok(json_text(&json!({
        "alpha": num(pair.alpha()),
        "lower": num(b.lower),
        "upper": num(b.upper),
        "quadrature_reference": num(reference),
    })))
}
