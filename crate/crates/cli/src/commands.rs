use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use vacfluct::casimir::{casimir_force, casimir_force_perfect_1d};
use vacfluct::mechanics::{noise_decomposition, position_noise, stability_report};
use vacfluct::numerics::KramersKronig;
use vacfluct::spectrum::default_grid;
use vacfluct::stress4d::stress_correlation;
use vacfluct::vacuum_spectra::{
    force_noise, force_noise_perfect, motional_susceptibility, motional_susceptibility_perfect,
    thermal_spectra,
};
use vacfluct::{
    CavityConfig, Complex64, Error, FourMomentum, MechanicalOscillator, MirrorModel,
    Spectrum, SpectrumKind,
};

use crate::config::{Format, RunConfig};
use crate::output::{num, sidecar_path, with_output, write_json, Cell, Table};
use crate::{exit_code, CliError};

/// Exit code of the first failed row, 0 if none.
fn first_failure(codes: impl IntoIterator<Item = u8>) -> u8 {
    codes.into_iter().find(|&c| c != 0).unwrap_or(0)
}

fn status(e: &Error) -> Cell {
    Cell::Text(
        match exit_code(e) {
            3 => "convergence",
            2 => "input",
            _ => "physics",
        }
        .into(),
    )
}

fn ok() -> Cell {
    Cell::Text("ok".into())
}

fn require_perfect(model: &MirrorModel) -> Result<(), CliError> {
    if matches!(model, MirrorModel::Perfect) {
        Ok(())
    } else {
        Err(CliError::Config("--closed-form needs kind=perfect mirrors".into()))
    }
}

/// Explicit grid, or the default susceptibility grid scaled to the mirror.
fn spectrum_grid(cfg: &RunConfig, model: &MirrorModel) -> Result<Vec<f64>, CliError> {
    let grid = match cfg.grid {
        Some(g) => g.values()?,
        None => default_grid(model.transparency_scale().unwrap_or(1.0)).map_err(CliError::Lib)?,
    };
    if grid[0] < 0.0 {
        return Err(CliError::Config("spectra are emitted for w >= 0 only".into()));
    }
    Ok(grid)
}

/// Default relative tolerances. Casimir sums many resonance panels, whose
/// rounding floor sits near 1e-10 of the force.
const CASIMIR_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-12;

/// Absolute tolerance from the relative one, on the perfect-mirror scale.
fn abs_tol(rel: f64, scale: f64) -> f64 {
    rel * scale.max(f64::MIN_POSITIVE)
}

pub fn casimir(cfg: &RunConfig) -> Result<u8, CliError> {
    let (m1, m2) = match cfg.mirrors.as_slice() {
        [a, b] => (a.clone(), b.clone()),
        [] if cfg.closed_form => (MirrorModel::Perfect, MirrorModel::Perfect),
        _ => return Err(CliError::Config("casimir needs two --mirror specs".into())),
    };
    let qs = if !cfg.q.is_empty() {
        cfg.q.clone()
    } else if let Some(g) = cfg.grid {
        let qs = g.values()?;
        if qs[0] <= 0.0 {
            return Err(CliError::Config("separations must be positive".into()));
        }
        qs
    } else {
        return Err(CliError::Config("casimir needs --q or a --grid of separations".into()));
    };
    if cfg.closed_form {
        require_perfect(&m1)?;
        require_perfect(&m2)?;
    }
    let h = cfg.hbar;
    let tol = cfg.tol.unwrap_or(CASIMIR_TOL);
    let rows: Vec<(Vec<Cell>, u8)> = qs
        .par_iter()
        .map(|&q| {
            let result = if cfg.closed_form {
                casimir_force_perfect_1d(q, h).map(|f| (f, 0.0, 0))
            } else {
                CavityConfig::new(m1.clone(), m2.clone(), q)
                    .and_then(|cav| casimir_force(&cav, abs_tol(tol, h.get() * PI / (24.0 * q * q)), h))
                    .map(|f| (f.value, f.abs_error_estimate, f.evaluations))
            };
            match result {
                Ok((f, err, n)) => (vec![Cell::Real(q), Cell::Real(f), Cell::Real(err), Cell::Int(n as u64), ok()], 0),
                Err(e) => {
                    let (f, err, n) = match e {
                        Error::Convergence { partial, abs_error, evaluations } => (partial, abs_error, evaluations),
                        _ => (f64::NAN, f64::NAN, 0),
                    };
                    let row = vec![Cell::Real(q), Cell::Real(f), Cell::Real(err), Cell::Int(n as u64), status(&e)];
                    (row, exit_code(&e))
                }
            }
        })
        .collect();
    let mut table = Table::new("casimir", &["q", "force", "abs_error", "evaluations", "status"]);
    emit(cfg, &mut table, rows)
}

fn emit(cfg: &RunConfig, table: &mut Table, rows: Vec<(Vec<Cell>, u8)>) -> Result<u8, CliError> {
    let mut codes = Vec::with_capacity(rows.len());
    for (row, code) in rows {
        table.push(row);
        codes.push(code);
    }
    with_output(cfg.out.as_deref(), |w| table.write(w, cfg.format))?;
    Ok(first_failure(codes))
}

pub fn noise(cfg: &RunConfig) -> Result<u8, CliError> {
    let model = cfg.single_mirror()?;
    if cfg.closed_form {
        require_perfect(model)?;
    }
    let grid = spectrum_grid(cfg, model)?;
    let (h, t) = (cfg.hbar, cfg.temperature);
    let tol = cfg.tol.unwrap_or(SPECTRUM_TOL);
    let point = |w: f64| -> vacfluct::Result<(f64, f64, f64)> {
        let (c_vac, chi) = if cfg.closed_form {
            (force_noise_perfect(w, h), motional_susceptibility_perfect(w.into(), h))
        } else {
            let c = force_noise(model, w, abs_tol(tol, force_noise_perfect(w, h)), h)?;
            let scale = h.get() * w.abs().powi(3) / (6.0 * PI);
            (c, motional_susceptibility(model, w, abs_tol(tol, scale), h)?)
        };
        let xi = Spectrum::real(SpectrumKind::Commutator, vec![w], vec![chi.im])?;
        let (c_th, sigma) = thermal_spectra(&xi, t, h)?;
        let c = if t.is_vacuum() { c_vac } else { c_th.real_values()?[0] };
        Ok((c, chi.im, sigma.real_values()?[0]))
    };
    let rows: Vec<(Vec<Cell>, u8)> = grid
        .par_iter()
        .map(|&w| {
            let (values, st, code) = match point(w) {
                Ok(v) => (v, ok(), 0),
                Err(e) => ((f64::NAN, f64::NAN, f64::NAN), status(&e), exit_code(&e)),
            };
            let row = vec![
                Cell::Real(w),
                Cell::Real(values.0),
                Cell::Real(values.1),
                Cell::Real(values.2),
                Cell::Real(t.get()),
                st,
            ];
            (row, code)
        })
        .collect();
    let mut table = Table::new("noise", &["omega", "c_ff", "xi_ff", "sigma_ff", "temperature", "status"]);
    emit(cfg, &mut table, rows)
}

pub fn susceptibility(cfg: &RunConfig) -> Result<u8, CliError> {
    let model = cfg.single_mirror()?;
    if cfg.closed_form {
        require_perfect(model)?;
    }
    let grid = spectrum_grid(cfg, model)?;
    let h = cfg.hbar;
    let tol = cfg.tol.unwrap_or(SPECTRUM_TOL);
    let chi: Vec<vacfluct::Result<Complex64>> = grid
        .par_iter()
        .map(|&w| {
            if cfg.closed_form {
                Ok(motional_susceptibility_perfect(w.into(), h))
            } else {
                let scale = h.get() * w.powi(3) / (6.0 * PI);
                motional_susceptibility(model, w, abs_tol(tol, scale), h)
            }
        })
        .collect();

    // local dispersion defect on the central half, when every point converged
    let mut kk = vec![f64::NAN; grid.len()];
    let mut kk_code = 0;
    if let Ok(values) = chi.iter().cloned().collect::<vacfluct::Result<Vec<_>>>() {
        let report = Spectrum::complex(SpectrumKind::Susceptibility, grid.clone(), values.clone())
            .and_then(|s| KramersKronig::default().check(&s));
        match report {
            Ok(r) => {
                let idx: Vec<usize> = r
                    .omega
                    .iter()
                    .map(|w| grid.partition_point(|g| g < w))
                    .collect();
                let scale = idx.iter().fold(0.0f64, |a, &i| a.max(values[i].norm()));
                for (&i, rec) in idx.iter().zip(&r.reconstructed_re) {
                    kk[i] = (rec - values[i].re).abs() / scale;
                }
            }
            // a grid too small for the check is not a failure of the spectrum
            Err(e @ Error::Argument(_)) => eprintln!("warning: dispersion check skipped: {e}"),
            Err(e) => {
                eprintln!("warning: dispersion check failed: {e}");
                kk_code = exit_code(&e);
            }
        }
    }
    let rows: Vec<(Vec<Cell>, u8)> = grid
        .iter()
        .zip(chi)
        .zip(kk)
        .map(|((&w, c), d)| match c {
            Ok(c) => (vec![Cell::Real(w), Cell::Real(c.re), Cell::Real(c.im), Cell::Real(d), ok()], 0),
            Err(e) => {
                let nan = Cell::Real(f64::NAN);
                (vec![Cell::Real(w), nan.clone(), nan.clone(), nan, status(&e)], exit_code(&e))
            }
        })
        .collect();
    let mut table = Table::new("susceptibility", &["omega", "re_chi", "im_chi", "kk_defect", "status"]);
    let code = emit(cfg, &mut table, rows)?;
    Ok(if code != 0 { code } else { kk_code })
}

fn oscillator(cfg: &RunConfig) -> Result<MechanicalOscillator, CliError> {
    let mirror = cfg.single_mirror()?.clone();
    MechanicalOscillator::new(cfg.m0()?, cfg.omega0, mirror).map_err(|e| CliError::Config(e.to_string()))
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    if cfg.format == Format::Csv && cfg.format_given {
        return Err(CliError::Config(format!("{command} writes JSON only")));
    }
    Ok(())
}

pub fn stability(cfg: &RunConfig) -> Result<u8, CliError> {
    json_only(cfg, "stability")?;
    let osc = oscillator(cfg)?;
    let r = stability_report(&osc, cfg.hbar).map_err(CliError::Lib)?;
    let l = &r.ledger;
    let doc = json!({
        "hbar": num(cfg.hbar.get()),
        "m0": num(osc.m0),
        "omega0": num(osc.omega0),
        "mirror": osc.mirror.name(),
        "stable": r.stable,
        "uhp_pole_count": r.uhp_pole_count,
        "contour_radius": num(r.contour_radius),
        "positive_real_defect": num(r.positive_real_defect),
        "sign_resolved": l.sign_resolved(),
        "ledger": {
            "m0": num(l.m0),
            "m_inf": num(l.m_inf),
            "induced_mass": num(l.induced_mass),
            "induced_mass_uncertainty": num(l.induced_mass_uncertainty),
            "omega_c": num(l.omega_c),
            "omega_c_uncertainty": num(l.omega_c_uncertainty),
            "fit_residual": num(l.fit_residual),
        },
    });
    with_output(cfg.out.as_deref(), |w| write_json(w, &doc))?;
    Ok(0)
}

pub fn position_noise_cmd(cfg: &RunConfig) -> Result<u8, CliError> {
    let osc = oscillator(cfg)?;
    let grid = cfg.grid()?;
    let noise = position_noise(&osc, &grid, cfg.hbar).map_err(CliError::Lib)?;
    let c = noise.c_qq.real_values().map_err(CliError::Lib)?;
    let xi = noise.xi_qq.real_values().map_err(CliError::Lib)?;
    let mut table = Table::new("position-noise", &["omega", "c_qq", "xi_qq", "re_y", "im_y", "status"]);
    let mut kept = noise.c_qq.grid().iter().zip(c).zip(xi).zip(&noise.admittance).peekable();
    for &w in &grid {
        match kept.peek() {
            Some((((&wk, &ck), &xk), yk)) if wk == w => {
                table.push(vec![Cell::Real(w), Cell::Real(ck), Cell::Real(xk), Cell::Real(yk.re), Cell::Real(yk.im), ok()]);
                kept.next();
            }
            _ => {
                let nan = Cell::Real(f64::NAN);
                table.push(vec![Cell::Real(w), nan.clone(), nan.clone(), nan.clone(), nan, Cell::Text("resonance".into())]);
            }
        }
    }

    let (decomposition, code) = match noise_decomposition(&osc, &grid, cfg.hbar) {
        Ok(d) => {
            let peak = match d.peak {
                Some(p) => json!({
                    "center": num(p.center),
                    "half_width": num(p.half_width),
                    "height": num(p.height),
                    "area": num(p.area),
                }),
                None => Value::Null,
            };
            let doc = json!({
                "peak": peak,
                "background_median": num(d.background_median),
                "background_points": d.background_points,
                "dropped": d.dropped.iter().map(|&w| num(w)).collect::<Vec<_>>(),
                "error": Value::Null,
            });
            (doc, 0)
        }
        Err(e) => {
            eprintln!("warning: {e}");
            let doc = json!({
                "peak": Value::Null,
                "background_median": Value::Null,
                "background_points": 0,
                "dropped": noise.dropped.iter().map(|&w| num(w)).collect::<Vec<_>>(),
                "error": e.to_string(),
            });
            (doc, exit_code(&e))
        }
    };

    match cfg.format {
        Format::Json => {
            let mut doc = table.to_json();
            doc.as_object_mut().unwrap().insert("decomposition".into(), decomposition);
            with_output(cfg.out.as_deref(), |w| write_json(w, &doc))?;
        }
        Format::Csv => {
            with_output(cfg.out.as_deref(), |w| table.write(w, Format::Csv))?;
            match &cfg.out {
                Some(p) => with_output(Some(&sidecar_path(p)), |w| write_json(w, &decomposition))?,
                None => eprintln!("note: the decomposition sidecar is written only with --out"),
            }
        }
    }
    Ok(code)
}

/// Components below this fraction of the largest are rounding noise.
const COMPONENT_CUTOFF: f64 = 1e-14;

pub fn stress4d(cfg: &RunConfig, k: &[f64]) -> Result<u8, CliError> {
    json_only(cfg, "stress4d")?;
    let [k0, k1, k2, k3] = k else {
        return Err(CliError::Config("stress4d needs four momentum components".into()));
    };
    let mom = FourMomentum::new(*k0, *k1, *k2, *k3).map_err(|e| CliError::Config(e.to_string()))?;
    let c = stress_correlation(&mom, cfg.hbar);
    let cut = COMPONENT_CUTOFF * c.max_abs();
    let mut components = Map::new();
    for m in 0..4 {
        for n in 0..4 {
            for r in 0..4 {
                for s in 0..4 {
                    let v = c.get(m, n, r, s);
                    if v != 0.0 && v.abs() > cut {
                        components.insert(format!("{m},{n},{r},{s}"), num(v));
                    }
                }
            }
        }
    }
    let doc = json!({
        "hbar": num(cfg.hbar.get()),
        "k": mom.components().iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "k_squared": num(mom.square()),
        "components": Value::Object(components),
    });
    with_output(cfg.out.as_deref(), |w| write_json(w, &doc))?;
    Ok(0)
}
