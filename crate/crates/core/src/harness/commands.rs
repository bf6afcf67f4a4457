use std::f64::consts::PI;

use num_bigint::BigInt;

use super::config::{big_to_f64, check_delta, check_t, RunConfig};
use super::rng::SplitMix64;
use super::Output;
use crate::diophantine::{
    convergents, diophantine_direction, directional_alpha, estimate_kappa, expand_to_denominator,
    CfStop, DirectionChoice,
};
use crate::error::{Error, Result};
use crate::fixed::FixedReal;
use crate::forms::{standard_form, verify_equivalence, ShiftVector};
use crate::isometries::{apply, iota, Sl2, SoqMatrix};
use crate::literal::parse_real;
use crate::report::{real, Table};
use crate::solver::{
    count_values_bruteforce, estimate_critical_exponent, find_solutions, verify_solution,
    ExponentMode, Omega,
};
use crate::weyl_sums::{
    count_orbit_hits, sum_min, sum_min_explicit_bound, weyl_differencing_bound, weyl_sum,
    TorusPoint2,
};

fn choose_direction(cfg: &RunConfig, xi: &ShiftVector, q_max: u64) -> Result<DirectionChoice> {
    match cfg.direction()? {
        Some((a, c)) => {
            let alpha_tilde = directional_alpha(xi, a, c);
            let estimate = estimate_kappa(&alpha_tilde, q_max)?;
            Ok(DirectionChoice {
                a,
                c,
                alpha_tilde,
                estimate,
            })
        }
        None => diophantine_direction(xi, cfg.count("direction_bound", Some(1))?, q_max),
    }
}

fn isometry_for(choice: &DirectionChoice) -> Result<SoqMatrix<BigInt>> {
    let g = Sl2::with_first_column(BigInt::from(choice.a), BigInt::from(choice.c))?;
    Ok(iota(&g))
}

fn matrix_label(m: &SoqMatrix<BigInt>) -> String {
    m.to_string().replace('\n', "; ")
}

fn direction_meta(table: &mut Table, choice: &DirectionChoice) {
    table
        .meta("a", choice.a)
        .meta("c", choice.c)
        .meta("alpha_tilde", real(choice.alpha_tilde.to_f64()))
        .meta("kappa_hat", real(choice.estimate.kappa_hat))
        .meta("c_hat", real(choice.estimate.c_hat));
}

fn q_max(cfg: &RunConfig) -> Result<u64> {
    cfg.count("q_max", Some(1_000_000))
}

/// Solutions for `ξ` and `t`: the orbit runs on `ξ̃ = ξ·ι(g)` for the chosen
/// direction, and each `w` it finds is reported as `v = w·ι(g)⁻¹`, the
/// solution for the original `ξ` (`Q_ξ(v) = Q_ξ̃(w)`). Rows keep `‖v‖ ≤ T`
/// and are re-verified at twice the working precision before output.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Output> {
    let bits = cfg.precision()?;
    let xi = cfg.xi(bits)?;
    let t = cfg.real("t", Some("0/1"), bits)?;
    let tb = cfg.count("T", None)?;
    check_t(tb)?;
    let delta = cfg.delta_for(tb, bits)?;
    let scan_c = cfg.number("scan_c", 1.0)?;
    let bound_c = cfg.number("bound_C", 32.0)?;

    let choice = choose_direction(cfg, &xi, q_max(cfg)?)?;
    let iso = isometry_for(&choice)?;
    let xt = apply(&xi, &iso)?;
    if !(xt.alpha() - &choice.alpha_tilde).within(-40) {
        return Err(Error::Soundness("ξ·ι(g) does not start with α̃".into()));
    }
    let mut warnings = Vec::new();
    if let Some(nu) = cfg.nu(bits)? {
        let limit = 1.0 / (8.0 * choice.estimate.kappa_hat);
        if nu > limit {
            warnings.push(format!(
                "nu = {nu} exceeds 1/(8·kappa_hat) = {limit:.6}; the density guarantee does not cover this run"
            ));
        }
    }
    let report = find_solutions(&xt, &t, tb, delta, scan_c, bound_c)?;

    let hi = 2 * bits;
    let xi_hi = cfg.xi(hi)?;
    let t_hi = cfg.real("t", Some("0/1"), hi)?;
    let xt_hi = apply(&xi_hi, &iso)?;
    let back = iso.inverse();
    let form = standard_form();
    let bound2 = BigInt::from(tb) * BigInt::from(tb);
    let mut table = Table::new(&crate::solver::SolveReport::COLUMNS);
    let mut kept = 0usize;
    for s in &report.solutions {
        verify_solution(&xt_hi, &t_hi, &report, s)?;
        let v = back.act(&s.v);
        if iso.act(&v) != s.v {
            return Err(Error::Soundness(format!(
                "m = {}: v·ι(g) differs from w",
                s.m
            )));
        }
        if v.iter().map(|x| x * x).sum::<BigInt>() > bound2 {
            continue;
        }
        let value = form.evaluate_shifted(&xi_hi, &v)?;
        if (value.to_f64() - s.value).abs() > 1e-9 * s.value.abs().max(1.0) {
            return Err(Error::Soundness(format!(
                "m = {}: Q_ξ(v) = {} but the orbit frame gave {}",
                s.m,
                value.to_f64(),
                s.value
            )));
        }
        kept += 1;
        table.push(vec![
            s.m.to_string(),
            s.u[1].to_string(),
            s.u[2].to_string(),
            v[0].to_string(),
            v[1].to_string(),
            v[2].to_string(),
            real(s.value),
            real(s.residual),
            real(s.torus_miss),
        ]);
    }
    direction_meta(&mut table, &choice);
    table
        .meta("isometry", matrix_label(&iso))
        .meta("T", tb)
        .meta("delta", real(delta))
        .meta("scan_c", real(scan_c))
        .meta("bound_C", real(bound_c))
        .meta("scanned", report.scanned)
        .meta("count", kept);
    Ok(Output { table, warnings })
}

fn parse_pair(s: &str, bits: u32) -> Result<(FixedReal, FixedReal)> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    let [x, y] = parts[..] else {
        return Err(Error::Parse {
            what: "pair of real literals",
            input: s.to_string(),
        });
    };
    Ok((parse_real(x, bits)?, parse_real(y, bits)?))
}

/// `N_φ(T, δ)` along a grid of `T`, against the area heuristic `πδ²T`.
pub fn cmd_count_orbit(cfg: &RunConfig) -> Result<Output> {
    let bits = cfg.precision()?;
    let xi = cfg.xi(bits)?;
    let (x0, y0) = parse_pair(&cfg.real_literal("v0", "0/1 0/1"), bits)?;
    let v0 = TorusPoint2::new(x0, y0)?;
    let grid = cfg.counts("T_grid", "10000,100000,1000000")?;
    let mut table = Table::new(&["T", "delta", "N_phi", "ratio", "rational"]);
    let mut warnings = Vec::new();
    for &tb in &grid {
        check_t(tb)?;
        let delta = cfg.delta_for(tb, bits)?;
        let n = count_orbit_hits(&xi, &v0, tb, delta, false)?.count;
        let rational =
            expand_to_denominator(xi.alpha(), &BigInt::from(tb)).stop == CfStop::Terminated;
        if rational {
            warnings.push(format!("T = {tb}: alpha is rational, the orbit is finite"));
        }
        table.push(vec![
            tb.to_string(),
            real(delta),
            n.to_string(),
            real(n as f64 / (PI * tb as f64 * delta * delta)),
            rational.to_string(),
        ]);
    }
    Ok(Output { table, warnings })
}

/// Both lemma inequalities on a grid of `(α, n, T)` with random `β`:
/// `|S_T|² ≤ T + 2Σ_{m≤T} min(1/‖2nmα‖, T)`, the latter `≤ T + 2·sum_min(α, 2|n|, T)`,
/// and `sum_min(α, 2|n|, T) ≤ 8|n|T²/q + 8(2|n|+1)T ln T`.
pub fn cmd_verify_lemmas(cfg: &RunConfig) -> Result<Output> {
    let bits = cfg.precision()?;
    let alphas = cfg.real_literal("alphas", "sqrt:2;surd:1,1,2,5");
    let ns = cfg.integers("ns", "1,3,50")?;
    let grid = cfg.counts("T_grid", "100,1000,10000")?;
    let samples = cfg.count("beta_samples", Some(20))?;
    let mut rng = SplitMix64::new(cfg.seed()?);
    let mut table = Table::new(&[
        "alpha",
        "n",
        "beta",
        "T",
        "S_sq",
        "differencing_bound",
        "sum_min",
        "explicit_bound",
        "pass",
    ]);
    let mut failures = 0;
    for lit in alphas.split(';').map(str::trim) {
        let alpha = parse_real(lit, bits)?;
        for &n in &ns {
            for &tb in &grid {
                check_t(tb)?;
                let m = 2 * n.unsigned_abs();
                let diff = weyl_differencing_bound(n, &alpha, tb)?;
                let smin = sum_min(&alpha, m, tb)?;
                let expl = sum_min_explicit_bound(&alpha, m, tb)?;
                let chain = n == 0 || diff <= (tb as f64 + 2.0 * smin) * (1.0 + 1e-12);
                for _ in 0..samples {
                    let b = rng.next_unit();
                    let beta = FixedReal::from_f64(b, bits)?;
                    let s2 = weyl_sum::<f64>(n, &alpha, &beta, tb)?.norm_sqr();
                    let pass = s2 <= diff * (1.0 + 1e-6) && chain && smin <= expl;
                    if !pass {
                        failures += 1;
                    }
                    table.push(vec![
                        lit.to_string(),
                        n.to_string(),
                        real(b),
                        tb.to_string(),
                        real(s2),
                        real(diff),
                        real(smin),
                        real(expl),
                        pass.to_string(),
                    ]);
                }
            }
        }
    }
    let mut out = Output::new(table);
    if failures > 0 {
        out.warnings
            .push(format!("{failures} case(s) violate an inequality"));
    }
    Ok(out)
}

/// Convergents of `α` (or of `α̃` in the best direction of `ξ`) with the κ estimate.
pub fn cmd_kappa(cfg: &RunConfig) -> Result<Output> {
    let bits = cfg.precision()?;
    let q_max = q_max(cfg)?;
    let mut table = Table::new(&["k", "a_k", "p", "q", "dist", "local_kappa"]);
    let (alpha, estimate) = if cfg.get("alpha").is_none() && cfg.get("xi").is_some() {
        let choice = choose_direction(cfg, &cfg.xi(bits)?, q_max)?;
        table.meta("a", choice.a).meta("c", choice.c);
        (choice.alpha_tilde, choice.estimate)
    } else {
        let alpha = cfg.real("alpha", None, bits)?;
        let est = estimate_kappa(&alpha, q_max)?;
        (alpha, est)
    };
    let cf = expand_to_denominator(&alpha, &BigInt::from(q_max));
    for (k, (c, a)) in convergents(&cf.quotients, &alpha)?
        .iter()
        .zip(&cf.quotients)
        .enumerate()
    {
        let local = if c.q >= BigInt::from(2) {
            real(-c.dist.to_f64().ln() / big_to_f64(&c.q).ln())
        } else {
            String::new()
        };
        table.push(vec![
            k.to_string(),
            a.to_string(),
            c.p.to_string(),
            c.q.to_string(),
            real(c.dist.to_f64()),
            local,
        ]);
    }
    table
        .meta("alpha", real(alpha.to_f64()))
        .meta("q_max", q_max)
        .meta("kappa_hat", real(estimate.kappa_hat))
        .meta("c_hat", real(estimate.c_hat))
        .meta("dirichlet_constant", real(estimate.dirichlet_constant()));
    Ok(Output::new(table))
}

/// `ω̂(T)` along a grid, from the exhaustive oracle or from the orbit scan.
///
/// Solver mode runs in the frame of the chosen direction, like `solve`, and
/// measures `‖w‖ ≤ T` there.
pub fn cmd_exponent(cfg: &RunConfig) -> Result<Output> {
    let bits = cfg.precision()?;
    let xi = cfg.xi(bits)?;
    let t = cfg.real("t", Some("0/1"), bits)?;
    let grid = cfg.counts("T_grid", "20,40,80,160")?;
    for &tb in &grid {
        check_t(tb)?;
    }
    let mut table = Table::new(&["T", "min_residual", "omega_hat", "saturated"]);
    let rows = match cfg.get("mode").unwrap_or("oracle") {
        "oracle" => {
            table.meta("mode", "oracle");
            estimate_critical_exponent(&xi, &t, &grid, ExponentMode::Oracle)?
        }
        "solver" => {
            let scan_c = cfg.number("scan_c", 1.0)?;
            let choice = choose_direction(cfg, &xi, q_max(cfg)?)?;
            let xt = apply(&xi, &isometry_for(&choice)?)?;
            table.meta("mode", "solver");
            direction_meta(&mut table, &choice);
            estimate_critical_exponent(&xt, &t, &grid, ExponentMode::Solver { scan_c })?
        }
        other => {
            return Err(Error::validation(format!(
                "mode = {other:?}: expected oracle or solver"
            )))
        }
    };
    for r in rows {
        let (omega, saturated) = match r.omega_hat {
            Omega::Finite(x) => (real(x), false),
            Omega::Saturated => (real(f64::INFINITY), true),
        };
        table.push(vec![
            r.t_bound.to_string(),
            real(r.min_residual),
            omega,
            saturated.to_string(),
        ]);
    }
    Ok(Output::new(table))
}

/// Exhaustive count of `‖v‖ ≤ T`, `|Q_ξ(v) − t| ≤ δ` for the standard or a
/// given rational form, with an isotropic vector search and an optional
/// equivalence check in the preamble.
pub fn cmd_oracle_count(cfg: &RunConfig) -> Result<Output> {
    let bits = cfg.precision()?;
    let form = cfg.form()?.unwrap_or_else(standard_form);
    let xi = cfg.xi(bits)?;
    let t = cfg.real("t", Some("0/1"), bits)?;
    let tb = cfg.count("T", None)?;
    check_t(tb)?;
    let delta = cfg.delta_for(tb, bits)?;
    check_delta(delta)?;
    let iso_bound = cfg.count("isotropic_bound", Some(10))?;

    let mut table = Table::new(&[
        "T",
        "delta",
        "count",
        "min_residual",
        "argmin_v1",
        "argmin_v2",
        "argmin_v3",
    ]);
    table.meta("form", &form);
    let iso = match form.find_isotropic_vector(iso_bound) {
        Some(v) => format!("{} {} {}", v[0], v[1], v[2]),
        None => format!("none with entries up to {iso_bound}"),
    };
    table.meta("isotropic_vector", iso);
    match (cfg.get("equivalence_m"), cfg.matrix("equivalence_matrix")?) {
        (Some(m), Some(mat)) => {
            let m: BigInt = m
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("equivalence_m = {m:?}: not an integer")))?;
            table.meta(
                "equivalent_to_standard",
                verify_equivalence(&form, &m, &mat),
            );
        }
        (None, None) => {}
        _ => {
            return Err(Error::validation(
                "equivalence needs both equivalence_m and equivalence_matrix",
            ))
        }
    }

    let r = count_values_bruteforce(&form, &xi, &t, tb, delta, false)?;
    table.push(vec![
        tb.to_string(),
        real(delta),
        r.count.to_string(),
        real(r.min_residual.to_f64()),
        r.argmin[0].to_string(),
        r.argmin[1].to_string(),
        r.argmin[2].to_string(),
    ]);
    Ok(Output::new(table))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::parse(text).unwrap()
    }

    #[test]
    fn solve_sqrt2() {
        let out = cmd_solve(&cfg("xi = sqrt:2 0/1 0/1\nT = 10000\ndelta = 1/5")).unwrap();
        assert!(!out.table.rows().is_empty());
        for row in out.table.rows() {
            let residual: f64 = row[7].parse().unwrap();
            assert!(residual <= 32.0 * 0.2);
            assert_eq!(row[3], "0");
        }
        let csv = out.table.to_csv();
        assert!(csv.contains("# a = 1\n# c = 0\n"));
    }

    #[test]
    fn solve_rejections() {
        let e = cmd_solve(&cfg("xi = 1/2 1/3 1/4\nT = 10000\ndelta = 1/5")).unwrap_err();
        assert!(matches!(e, Error::AllRational { .. }));
        let e = cmd_solve(&cfg("xi = sqrt:2 0/1 0/1\nT = 10000\ndelta = 1/2")).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
        let e = cmd_solve(&cfg("xi = sqrt:2 0/1 0/1\nT = 3\ndelta = 1/5")).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
    }

    #[test]
    fn solve_in_another_direction() {
        // α = 0 is rational, so the search moves to a direction with α̃ irrational
        let out = cmd_solve(&cfg("xi = 0/1 sqrt:2 sqrt:3\nT = 1000000\ndelta = 1/5")).unwrap();
        assert!(out.table.to_csv().contains("# isometry = "));
        assert!(!out.table.rows().is_empty());
    }

    #[test]
    fn nu_above_range_warns() {
        let out = cmd_solve(&cfg("xi = sqrt:2 0/1 0/1\nT = 10000\nnu = 49/100")).unwrap();
        assert_eq!(out.warnings.len(), 1);
        let out = cmd_solve(&cfg("xi = sqrt:2 0/1 0/1\nT = 10000\nnu = 1/10")).unwrap();
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn count_orbit_rows() {
        let out = cmd_count_orbit(&cfg("xi = sqrt:2 0/1 0/1\nT_grid = 10000\nnu = 1/5")).unwrap();
        let row = &out.table.rows()[0];
        let ratio: f64 = row[3].parse().unwrap();
        assert!((0.5..=2.0).contains(&ratio));
        assert_eq!(row[4], "false");

        let out = cmd_count_orbit(&cfg("xi = 1/4 0/1 0/1\nT_grid = 1000\ndelta = 1/10")).unwrap();
        assert_eq!(out.table.rows()[0][4], "true");
        assert!(cmd_count_orbit(&cfg("xi = sqrt:2 0/1 0/1\nT_grid = 1000\ndelta = 0/1")).is_err());
    }

    #[test]
    fn verify_lemmas_small_suite() {
        let text =
            "ns = 1,3\nT_grid = 100,1000\nbeta_samples = 5\nalphas = sqrt:2;surd:1,1,2,5;0/1";
        let out = cmd_verify_lemmas(&cfg(text)).unwrap();
        assert_eq!(out.table.rows().len(), 3 * 2 * 2 * 5);
        assert!(out.table.rows().iter().all(|r| r[8] == "true"));
        assert!(out.warnings.is_empty());
        let other = cmd_verify_lemmas(&cfg(&format!("{text}\nseed = 99"))).unwrap();
        assert_ne!(other.table.rows()[0][2], out.table.rows()[0][2]);
        assert!(other.table.rows().iter().all(|r| r[8] == "true"));
    }

    #[test]
    fn kappa_outputs() {
        let out = cmd_kappa(&cfg("alpha = surd:1,1,2,5\nq_max = 1000")).unwrap();
        let csv = out.table.to_csv();
        assert!(csv.contains("# kappa_hat = "));
        assert_eq!(out.table.rows()[0][3], "1");
        let e = cmd_kappa(&cfg("alpha = dec:0.5")).unwrap_err();
        assert!(matches!(e, Error::Rational(_)));
        let out = cmd_kappa(&cfg(
            "xi = 0/1 sqrt:2 0/1\ndirection_bound = 2\nq_max = 10000",
        ))
        .unwrap();
        assert!(out.table.to_csv().contains("# a = "));
    }

    #[test]
    fn exponent_rows() {
        let out = cmd_exponent(&cfg("xi = sqrt:2 0/1 0/1\nT_grid = 20,40")).unwrap();
        for r in out.table.rows() {
            assert!(r[2].parse::<f64>().unwrap() >= 0.125);
        }
        let out = cmd_exponent(&cfg("xi = 0/1 0/1 0/1\nT_grid = 8,16")).unwrap();
        assert!(out.table.rows().iter().all(|r| r[3] == "true"));
        assert!(cmd_exponent(&cfg("xi = sqrt:2 0/1 0/1\nT_grid = 40,20")).is_err());
        let out = cmd_exponent(&cfg(
            "xi = sqrt:2 0/1 0/1\nT_grid = 100,10000\nmode = solver",
        ))
        .unwrap();
        assert_eq!(out.table.rows().len(), 2);
    }

    #[test]
    fn oracle_count_header() {
        let text = "form = 1 1 -2 0 0 0\nxi = sqrt:2 0/1 0/1\nT = 6\ndelta = 1/4\n\
                    equivalence_m = 1\nequivalence_matrix = 1 0 0 0 1 0 0 0 1";
        let out = cmd_oracle_count(&cfg(text)).unwrap();
        let csv = out.table.to_csv();
        assert!(csv.contains("# isotropic_vector = 1 -7 -5"));
        assert!(csv.contains("# equivalent_to_standard = false"));
        let out = cmd_oracle_count(&cfg("xi = sqrt:2 0/1 0/1\nT = 6\ndelta = 1/4")).unwrap();
        assert!(out.table.to_csv().contains("# isotropic_vector = 0 0 1"));
    }
}
