use ionflux_core::io::config::ConfigErrorKind;
use ionflux_core::io::csv::parse_csv;
use ionflux_core::io::presets::{preset_artifact, preset_config, run_preset};
use ionflux_core::Error;

fn rows_for(table: &ionflux_core::io::csv::Table, c: f64) -> Vec<Vec<f64>> {
    table.rows.iter().filter(|r| r[0] == c).cloned().collect()
}

#[test]
fn fig3b_populations_settle_with_p2_above_p0() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_preset("fig3b", dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    let (comments, table) = parse_csv(&std::fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert!(comments.contains(&"mode_tag: lab-lindblad".to_string()));
    let t = table.column("t").unwrap();
    let t_end = *t.last().unwrap();
    for col in ["P0", "P1", "P2"] {
        let p = table.column(col).unwrap();
        let late: Vec<f64> = t.iter().zip(&p).filter(|(t, _)| **t >= 0.9 * t_end).map(|(_, p)| *p).collect();
        let swing = late.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - late.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(swing < 1e-3, "{col} still moving: {swing}");
    }
    let last = table.rows.last().unwrap();
    assert!(last[3] > last[1], "P2 {} <= P0 {}", last[3], last[1]);
}

#[test]
fn fig3b_binds_documented_rates() {
    let cfg = preset_config("fig3b").unwrap();
    assert_eq!((cfg.model.omega0, cfg.model.gamma, cfg.model.c), (1e8, 5e6, 1e7));
    let cfg = preset_config("fig3a").unwrap();
    assert_eq!((cfg.model.omega0, cfg.model.gamma, cfg.model.c), (1e8, 0.0, 2e7));
    let cfg = preset_config("fig-cd").unwrap();
    assert_eq!(cfg.sweep.unwrap().values, vec![0.0, 1e7, 2e7, 4e7]);
}

#[test]
#[ignore = "unattainable: with c = 0 the |0>-|-1> coherence decays at rate gamma, so C_d stays above 1e-3 until ~9.5e-7 s, and the late-time oscillation amplitude falls with c (2.6e-4 at c = 4e7 vs 1.4e-3 at c = 1e7)"]
fn fig_cd_matches_qualitative_description() {
    let art = preset_artifact("fig-cd").unwrap();
    let cd_col = art.table.header.iter().position(|h| h == "cd").unwrap();
    let c0 = rows_for(&art.table, 0.0);
    assert!(c0.iter().filter(|r| r[1] > 5e-7).all(|r| r[cd_col] < 1e-3));
    let amp = |c: f64| {
        let ys: Vec<f64> = rows_for(&art.table, c).iter().filter(|r| r[1] >= 1e-6).map(|r| r[cd_col]).collect();
        let ext: Vec<f64> = ys.windows(3).filter(|w| (w[1] - w[0]) * (w[2] - w[1]) < 0.0).map(|w| w[1]).collect();
        ext.windows(2).map(|p| (p[1] - p[0]).abs() / 2.0).sum::<f64>() / (ext.len().max(2) - 1) as f64
    };
    assert!(amp(4e7) > amp(1e7));
}

#[test]
fn fig_cd_has_one_curve_per_hopping_rate() {
    let art = preset_artifact("fig-cd").unwrap();
    let labels: Vec<&str> = art.curves.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels, ["c = 0", "c = 1e7", "c = 2e7", "c = 4e7"]);
    assert_eq!(art.table.header[0], "c");
    // without hopping the coherence still decays monotonically
    let cd = art.table.header.iter().position(|h| h == "cd").unwrap();
    let c0 = rows_for(&art.table, 0.0);
    assert!(c0.windows(2).all(|w| w[1][cd] <= w[0][cd] + 1e-12));
    assert!(c0.last().unwrap()[cd] < 1e-3);
}

#[test]
fn fig_offdiag_plots_real_and_imaginary_parts() {
    let art = preset_artifact("fig-offdiag").unwrap();
    let labels: Vec<&str> = art.curves.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(labels, ["re01", "re02", "re12", "im01", "im02", "im12"]);
}

#[test]
fn fig_g2_starts_at_three_quarters() {
    let art = preset_artifact("fig-g2").unwrap();
    assert_eq!(art.table.header, ["c", "tau", "g2"]);
    for c in [0.0, 1e7, 2e7, 4e7] {
        let first = &rows_for(&art.table, c)[0];
        assert_eq!(first[1], 0.0);
        assert!((first[2] - 0.75).abs() < 1e-9);
    }
}

#[test]
fn fig_dectime_stays_in_band() {
    let art = preset_artifact("fig-dectime").unwrap();
    assert_eq!(art.table.header, ["omega", "delta_x", "gamma", "tau_d"]);
    assert!(art.table.rows.iter().all(|r| (1e-10..=1e-7).contains(&r[3])));
    assert_eq!(art.curves.len(), 4);
}

#[test]
fn unknown_preset_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_preset("fig7", dir.path()).unwrap_err();
    assert!(matches!(&err, Error::Config(e) if e.kind == ConfigErrorKind::UnknownPreset("fig7".into())));
    assert_eq!(err.exit_code(), 2);
    let msg = err.to_string();
    for name in ["fig3a", "fig3b", "fig-offdiag", "fig-dectime", "fig-cd", "fig-g2"] {
        assert!(msg.contains(name));
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let err = run_preset("fig-dectime", &blocker).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(err.to_string().contains("file"));
}
