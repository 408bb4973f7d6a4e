//! Bundled reference configurations and the experiment catalog text.

use crate::config::ExperimentKind;

pub const BUNDLED: [(&str, &str); 8] = [
    (
        "fig1c_spectroscopy",
        include_str!("../configs/fig1c_spectroscopy.toml"),
    ),
    (
        "fig2b_groupIII",
        include_str!("../configs/fig2b_groupIII.toml"),
    ),
    ("fig2b_groupI", include_str!("../configs/fig2b_groupI.toml")),
    ("fig2c_chevron", include_str!("../configs/fig2c_chevron.toml")),
    (
        "fig3c_coherence",
        include_str!("../configs/fig3c_coherence.toml"),
    ),
    ("fig4b_ramsey", include_str!("../configs/fig4b_ramsey.toml")),
    ("figS5_aswap", include_str!("../configs/figS5_aswap.toml")),
    (
        "calibrate_readout",
        include_str!("../configs/calibrate_readout.toml"),
    ),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".toml").unwrap_or(name);
    BUNDLED
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, text)| *text)
}

fn experiment_help(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Rabi => {
            "storage/retrieval p(tau); fields: group, tau_max_ns, tau_step_ns"
        }
        ExperimentKind::Chevron => {
            "p(omega_B, tau) map; fields: group, detuning_span_mhz, detuning_step_mhz, tau grid"
        }
        ExperimentKind::Coherence => {
            "complex bus amplitude through store/retrieve; fields: group, tau grid (direct integration only)"
        }
        ExperimentKind::Ramsey => {
            "detuned interferometer fringes + spectrum; fields: group, detuning_mhz, tau grid, optional tau_half_swap_ns (direct integration)"
        }
        ExperimentKind::Spectroscopy => {
            "bus transmission map + dressed qubit branches; fields: bus/probe grids"
        }
        ExperimentKind::Aswap => {
            "adiabatic qubit-bus transfer; fields: schedule_t_ns/schedule_f_ghz, speedup, initial_state"
        }
        ExperimentKind::CalibrateReadout => {
            "readout error model from switching probabilities; fields: p_sw0, p_sw_pi, p_eq"
        }
    }
}

/// The `list` subcommand text: experiment catalog plus bundled configs.
pub fn catalog() -> String {
    let mut out = String::from("experiments:\n");
    for kind in ExperimentKind::ALL {
        out.push_str(&format!("  {:<18} {}\n", kind.name(), experiment_help(kind)));
    }
    out.push_str("\nbundled configs (usable as `spinbus run <name>`):\n");
    for (name, text) in BUNDLED {
        // first comment line doubles as the description
        let desc = text
            .lines()
            .next()
            .unwrap_or("")
            .trim_start_matches('#')
            .trim();
        out.push_str(&format!("  {name:<20} {desc}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn all_bundled_configs_parse() {
        for (name, text) in BUNDLED {
            let cfg = ExperimentConfig::parse(text);
            assert!(cfg.is_ok(), "{name}: {:?}", cfg.err());
        }
    }

    #[test]
    fn catalog_lists_all_experiments() {
        let text = catalog();
        for kind in ExperimentKind::ALL {
            assert!(text.contains(kind.name()), "missing {}", kind.name());
        }
        assert_eq!(catalog(), text, "catalog output must be stable");
    }
}
