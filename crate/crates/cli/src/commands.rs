use std::fmt::Write as _;
use std::time::Instant;

use cavity_raman::atomic::{
    effective_lines, raman_lines, AtomicLevel, CavityPolarization, StokesPolarization,
};
use cavity_raman::dynamics::{rate_from_photon_numbers, solve_model};
use cavity_raman::localization::{
    fit_scan, g_effective, sigma_from_visibility, standing_wave_scan, visibility_from_sigma,
    LocalizationParams, ScanPoint, SinSquaredFit,
};
use cavity_raman::spectrum::{
    find_peaks, sideband_overlay, strongest_peak, sweep_spectrum, Channel, LineKind, SpectrumRecord,
};
use serde_json::json;

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;
use crate::format::{fixed3, g9};

/// What a command produced: the main document and an optional plot script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub plot: Option<String>,
}

impl Output {
    fn text(body: String) -> Self {
        Output { body, plot: None }
    }
}

pub const SPECTRUM_HEADER: &str =
    "detuning_mhz,n_h,n_v,rate_h_cps,rate_v_cps,rate_total_cps,residual,top_fock_pop";

fn m_label(level: AtomicLevel) -> String {
    format!("{:+}/2", level.m().twice())
}

fn stokes_name(p: StokesPolarization) -> &'static str {
    match p {
        StokesPolarization::Pi => "pi",
        StokesPolarization::SigmaPlus => "sigma_plus",
        StokesPolarization::SigmaMinus => "sigma_minus",
    }
}

fn mode_name(p: CavityPolarization) -> &'static str {
    match p {
        CavityPolarization::H => "H",
        CavityPolarization::V => "V",
    }
}

fn kind_name(k: LineKind) -> &'static str {
    match k {
        LineKind::Carrier => "carrier",
        LineKind::AxialRed => "axial_red",
        LineKind::AxialBlue => "axial_blue",
        LineKind::RadialRed => "radial_red",
        LineKind::RadialBlue => "radial_blue",
    }
}

/// The twelve-line table, the effective lines of the configured drive and
/// their sideband overlay.
pub fn cmd_lines(cfg: &RunConfig) -> Result<Output, CliError> {
    let params = cfg.model();
    let field = params.field();
    let all = raman_lines(field);
    let effective = effective_lines(params.drive_config, field);
    let overlay = sideband_overlay(&effective, &cfg.sidebands());

    if cfg.format == OutputFormat::Json {
        let doc = json!({
            "b_mt": params.b_mt,
            "bohr_frequency_mhz": field.bohr_frequency_mhz(),
            "drive_config": params.drive_config.to_string(),
            "lines": all.iter().map(|l| json!({
                "label": l.line.label.to_string(),
                "m_s": m_label(l.line.initial),
                "m_p": m_label(l.line.intermediate),
                "m_d": m_label(l.line.final_level),
                "shift_factor": l.line.shift_factor.to_string(),
                "strength": l.line.strength.to_string(),
                "stokes_polarization": stokes_name(l.line.stokes_polarization),
                "position_mhz": l.position_mhz,
            })).collect::<Vec<_>>(),
            "effective_lines": effective.iter().map(|l| json!({
                "label": l.line.label.to_string(),
                "effective_strength": l.effective_strength.to_string(),
                "cavity_polarization": mode_name(l.cavity_polarization),
                "position_mhz": l.position_mhz,
            })).collect::<Vec<_>>(),
            "sidebands": overlay.iter().map(|o| json!({
                "label": o.label.to_string(),
                "kind": kind_name(o.kind),
                "position_mhz": o.position_mhz,
                "relative_strength": o.strength,
            })).collect::<Vec<_>>(),
        });
        return Ok(Output::text(serde_json::to_string_pretty(&doc)? + "\n"));
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Raman lines at B = {} mT, mu_B B / h = {} MHz",
        g9(params.b_mt),
        g9(field.bohr_frequency_mhz())
    );
    s.push_str("label,m_s,m_p,m_d,shift_factor,strength,stokes_polarization,position_mhz\n");
    for l in &all {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            l.line.label,
            m_label(l.line.initial),
            m_label(l.line.intermediate),
            m_label(l.line.final_level),
            l.line.shift_factor,
            l.line.strength,
            stokes_name(l.line.stokes_polarization),
            fixed3(l.position_mhz)
        );
    }
    let _ = writeln!(
        s,
        "# effective lines, drive_config = {}",
        params.drive_config
    );
    s.push_str("label,effective_strength,cavity_polarization,position_mhz\n");
    for l in &effective {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            l.line.label,
            l.effective_strength,
            mode_name(l.cavity_polarization),
            fixed3(l.position_mhz)
        );
    }
    let _ = writeln!(
        s,
        "# sideband overlay, axial {} MHz, radial {} MHz",
        g9(cfg.axial_freq_mhz),
        g9(cfg.radial_freq_mhz)
    );
    s.push_str("label,kind,position_mhz,relative_strength\n");
    for o in &overlay {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            o.label,
            kind_name(o.kind),
            fixed3(o.position_mhz),
            g9(o.strength)
        );
    }
    Ok(Output::text(s))
}

pub fn spectrum_csv(records: &[SpectrumRecord]) -> String {
    let mut s = String::with_capacity(128 * (records.len() + 1));
    s.push_str(SPECTRUM_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            g9(r.detuning_mhz),
            g9(r.n_h),
            g9(r.n_v),
            g9(r.rate_h_cps),
            g9(r.rate_v_cps),
            g9(r.rate_total_cps),
            g9(r.residual),
            g9(r.top_fock_population)
        );
    }
    s
}

fn data_file_name(cfg: &RunConfig) -> String {
    cfg.output.as_ref().map_or_else(
        || "data.csv".to_owned(),
        |p| p.display().to_string().replace('\'', "''"),
    )
}

fn spectrum_plot(cfg: &RunConfig) -> String {
    let file = data_file_name(cfg);
    format!(
        "set datafile separator ','\n\
         set xlabel 'two-photon detuning (MHz)'\n\
         set ylabel 'detected rate (counts/s)'\n\
         plot '{file}' skip 1 using 1:4 with lines title 'H', \\\n\
         \x20    '{file}' skip 1 using 1:5 with lines title 'V', \\\n\
         \x20    '{file}' skip 1 using 1:6 with lines title 'total'\n"
    )
}

/// Detuning sweep of the full model.
pub fn cmd_spectrum(cfg: &RunConfig, verbose: bool) -> Result<Output, CliError> {
    let spec = cfg.sweep();
    let started = Instant::now();
    let records = sweep_spectrum(&spec, &cfg.chain(), cfg.effective_workers())?;
    if verbose {
        eprintln!(
            "swept {} points on {} worker(s) in {:.2} s",
            records.len(),
            cfg.effective_workers(),
            started.elapsed().as_secs_f64()
        );
        for (name, channel) in [
            ("H", Channel::H),
            ("V", Channel::V),
            ("total", Channel::Total),
        ] {
            for p in find_peaks(&records, channel, cfg.min_prominence_cps) {
                eprintln!(
                    "peak {name:5} at {:+.3} MHz, {:.1} counts/s (prominence {:.1})",
                    p.position_mhz, p.height, p.prominence
                );
            }
        }
        let worst = records
            .iter()
            .map(|r| r.top_fock_population)
            .fold(0.0, f64::max);
        eprintln!("largest top-Fock population {worst:.3e}");
    }
    let body = match cfg.format {
        OutputFormat::Csv => spectrum_csv(&records),
        OutputFormat::Json => serde_json::to_string_pretty(&records)? + "\n",
    };
    let plot = cfg.plot_script.as_ref().map(|_| spectrum_plot(cfg));
    Ok(Output { body, plot })
}

/// Two-photon detuning at which the standing-wave scan is run.
///
/// Uses `scan_detuning_mhz` when configured. Otherwise it is the position of
/// the strongest total-rate resonance in the configured sweep range, found
/// with a one-photon truncation.
pub fn scan_detuning(cfg: &RunConfig) -> Result<f64, CliError> {
    if let Some(d) = cfg.scan_detuning_mhz {
        return Ok(d);
    }
    let mut spec = cfg.sweep();
    spec.params.n_max = 1;
    let records = sweep_spectrum(&spec, &cfg.chain(), cfg.effective_workers())?;
    strongest_peak(&records, Channel::Total, cfg.min_prominence_cps)
        .map(|p| p.position_mhz)
        .ok_or_else(|| {
            CliError::Numerical(format!(
                "no resonance with prominence above {} counts/s between {} and {} MHz",
                cfg.min_prominence_cps, cfg.sweep_start_mhz, cfg.sweep_stop_mhz
            ))
        })
}

/// Result of the standing-wave command.
#[derive(Debug, Clone, PartialEq)]
pub struct StandingWave {
    pub scan_detuning_mhz: f64,
    pub points: Vec<ScanPoint>,
    pub fit: SinSquaredFit,
    pub closed_form_visibility: f64,
}

pub fn run_standing_wave(cfg: &RunConfig) -> Result<StandingWave, CliError> {
    let delta = scan_detuning(cfg)?;
    let params = cfg.sweep().params_at(delta);
    let lp = cfg.localization();
    let chain = cfg.chain();
    let points = standing_wave_scan(
        &params,
        &lp,
        &cfg.displacements_nm,
        &chain,
        cfg.scan_options(),
    )?;
    let fit = fit_scan(&points, chain.background_cps, lp.wavelength_nm)?;
    Ok(StandingWave {
        scan_detuning_mhz: delta,
        points,
        fit,
        closed_form_visibility: visibility_from_sigma(&lp),
    })
}

fn standing_wave_plot(cfg: &RunConfig, sw: &StandingWave) -> String {
    let file = data_file_name(cfg);
    format!(
        "set datafile separator ','\n\
         set xlabel 'mirror displacement (nm)'\n\
         set ylabel 'detected rate (counts/s)'\n\
         a = {}\n\
         c = {}\n\
         phi = {}\n\
         bg = {}\n\
         k = 2*pi/{}\n\
         f(x) = bg + c + a*sin(k*x + phi)**2\n\
         plot '{file}' skip 1 using 1:2 with points title 'scan', \\\n\
         \x20    f(x) with lines title sprintf('V = %.3f', {})\n",
        g9(sw.fit.amplitude),
        g9(sw.fit.offset),
        g9(sw.fit.phase),
        g9(cfg.background_cps),
        g9(cfg.wavelength_nm),
        g9(sw.fit.visibility)
    )
}

/// Simulated standing-wave scan with its sin² fit.
pub fn cmd_standing_wave(cfg: &RunConfig, verbose: bool) -> Result<Output, CliError> {
    let started = Instant::now();
    let sw = run_standing_wave(cfg)?;
    if verbose {
        eprintln!(
            "scan at {:+.3} MHz over {} displacements in {:.2} s",
            sw.scan_detuning_mhz,
            sw.points.len(),
            started.elapsed().as_secs_f64()
        );
    }
    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("displacement_nm,rate_cps\n");
            for p in &sw.points {
                let _ = writeln!(s, "{},{}", g9(p.displacement_nm), g9(p.rate_cps));
            }
            let _ = writeln!(s, "# scan_detuning_mhz={}", g9(sw.scan_detuning_mhz));
            let _ = writeln!(s, "# background_cps={}", g9(cfg.background_cps));
            let _ = writeln!(s, "# amplitude_cps={}", g9(sw.fit.amplitude));
            let _ = writeln!(s, "# offset_cps={}", g9(sw.fit.offset));
            let _ = writeln!(s, "# phase_rad={}", g9(sw.fit.phase));
            let _ = writeln!(s, "# visibility={}", g9(sw.fit.visibility));
            let _ = writeln!(
                s,
                "# closed_form_visibility={}",
                g9(sw.closed_form_visibility)
            );
            s
        }
        OutputFormat::Json => {
            let doc = json!({
                "scan_detuning_mhz": sw.scan_detuning_mhz,
                "background_cps": cfg.background_cps,
                "points": sw.points,
                "fit": {
                    "amplitude_cps": sw.fit.amplitude,
                    "offset_cps": sw.fit.offset,
                    "phase_rad": sw.fit.phase,
                    "visibility": sw.fit.visibility,
                },
                "closed_form_visibility": sw.closed_form_visibility,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    let plot = cfg
        .plot_script
        .as_ref()
        .map(|_| standing_wave_plot(cfg, &sw));
    Ok(Output { body, plot })
}

/// σ ↔ V conversions and the reduced coupling.
pub fn cmd_localization(cfg: &RunConfig) -> Result<Output, CliError> {
    let lp = cfg.localization();
    let lambda = lp.wavelength_nm;
    let configured_sigma = sigma_from_visibility(cfg.visibility, lambda)?;

    let mut sigmas = vec![0.0, 18.0, 70.0, 100.0];
    if !sigmas.contains(&lp.sigma_nm) {
        sigmas.push(lp.sigma_nm);
    }
    let mut visibilities = vec![1.0, 0.60, 0.35];
    if !visibilities.contains(&cfg.visibility) {
        visibilities.push(cfg.visibility);
    }
    let sigma_rows: Vec<(f64, f64)> = sigmas
        .iter()
        .map(|&sigma_nm| {
            let p = LocalizationParams {
                sigma_nm,
                ..lp.clone()
            };
            (sigma_nm, visibility_from_sigma(&p))
        })
        .collect();
    let visibility_rows = visibilities
        .iter()
        .map(|&v| Ok((v, sigma_from_visibility(v, lambda)?)))
        .collect::<Result<Vec<(f64, f64)>, CliError>>()?;
    let g_eff = g_effective(cfg.g_max_mhz, &lp);

    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# wavelength_nm={}", g9(lambda));
            s.push_str("sigma_nm,visibility\n");
            for (sigma, v) in &sigma_rows {
                let _ = writeln!(s, "{},{}", g9(*sigma), g9(*v));
            }
            s.push_str("# inverse\nvisibility,sigma_nm\n");
            for (v, sigma) in &visibility_rows {
                let _ = writeln!(s, "{},{}", g9(*v), g9(*sigma));
            }
            s.push_str("# effective coupling\ng_max_mhz,sigma_nm,g_effective_mhz\n");
            let _ = writeln!(s, "{},{},{}", g9(cfg.g_max_mhz), g9(lp.sigma_nm), g9(g_eff));
            let _ = writeln!(s, "# lamb_dicke={}", g9(lp.lamb_dicke()));
            let _ = writeln!(
                s,
                "# sigma_for_visibility_{}={}",
                g9(cfg.visibility),
                g9(configured_sigma)
            );
            s
        }
        OutputFormat::Json => {
            let doc = json!({
                "wavelength_nm": lambda,
                "sigma_to_visibility": sigma_rows.iter().map(|(s, v)| json!({"sigma_nm": s, "visibility": v})).collect::<Vec<_>>(),
                "visibility_to_sigma": visibility_rows.iter().map(|(v, s)| json!({"visibility": v, "sigma_nm": s})).collect::<Vec<_>>(),
                "g_max_mhz": cfg.g_max_mhz,
                "sigma_nm": lp.sigma_nm,
                "g_effective_mhz": g_eff,
                "lamb_dicke": lp.lamb_dicke(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    Ok(Output::text(body))
}

/// Observables of the steady state at the configured detunings.
pub fn cmd_steady_state(cfg: &RunConfig, verbose: bool) -> Result<Output, CliError> {
    let params = cfg.model();
    params.validate()?;
    let ss = solve_model(&params)?;
    if verbose {
        eprintln!(
            "dimension {}, solved in {:.3} s",
            ss.space.total_dim(),
            ss.solution.solve_time
        );
    }
    let obs = &ss.observables;
    let n_h = obs.photon_number[0].max(0.0);
    let n_v = obs.photon_number.get(1).copied().unwrap_or(0.0).max(0.0);
    let rate = rate_from_photon_numbers(n_h, n_v, params.kappa_mhz, &cfg.chain());

    let mut rows: Vec<(String, f64)> = vec![
        (
            "two_photon_detuning_mhz".into(),
            params.two_photon_detuning(),
        ),
        ("n_h".into(), n_h),
        ("n_v".into(), n_v),
    ];
    for (k, p) in obs.top_fock_population.iter().enumerate() {
        rows.push((
            format!("top_fock_pop_{}", ["h", "v"].get(k).unwrap_or(&"mode")),
            *p,
        ));
    }
    for (name, p) in ["S", "P", "D"].iter().zip(obs.manifold_population) {
        rows.push((format!("pop_{name}"), p));
    }
    for (level, p) in AtomicLevel::ALL.iter().zip(obs.level_population) {
        rows.push((
            format!("pop_{}_m{}", &level.manifold().name()[..1], m_label(*level)),
            p,
        ));
    }
    rows.push(("rate_h_cps".into(), rate.h_cps));
    rows.push(("rate_v_cps".into(), rate.v_cps));
    rows.push(("rate_total_cps".into(), rate.total_cps));
    rows.push(("residual".into(), ss.solution.residual_norm));
    rows.push(("min_eigenvalue".into(), ss.solution.rho.min_eigenvalue()));

    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from("quantity,value\n");
            for (name, v) in &rows {
                let _ = writeln!(s, "{name},{}", g9(*v));
            }
            s
        }
        OutputFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                rows.into_iter().map(|(k, v)| (k, json!(v))).collect();
            serde_json::to_string_pretty(&map)? + "\n"
        }
    };
    Ok(Output::text(body))
}
