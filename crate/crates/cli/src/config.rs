//! Flat key=value configuration files and model-spec parsing.
//!
//! Configs are plain text: one `key=value` per line, `#` comments, blank
//! lines ignored. Every key must be consumed by the command that loads
//! the file; leftovers are reported as errors so typos cannot silently
//! fall back to defaults. Flags override config values, and the full
//! effective configuration is echoed into the run manifest.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use reslife_core::eval::{EstimatorConfig, ModelSpec};
use reslife_core::mlp::{GdConfig, LmConfig, MlpLayout, Transfer};
use reslife_core::sim::{BandChoice, PumpSimConfig, RenewalSimConfig};

/// A consumed-key-tracking view of a key=value map.
#[derive(Debug, Default, Clone)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
    source: String,
}

impl KvConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("{source}:{}: expected key=value, got {line:?}", i + 1)
            })?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                bail!("{source}:{}: duplicate key {key:?}", i + 1);
            }
        }
        Ok(Self {
            entries,
            source: source.to_string(),
        })
    }

    pub fn from_tokens<'a>(tokens: impl Iterator<Item = &'a str>, source: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for token in tokens {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| anyhow!("{source}: expected key=value, got {token:?}"))?;
            if entries
                .insert(key.trim().to_string(), value.trim().to_string())
                .is_some()
            {
                bail!("{source}: duplicate key {key:?}");
            }
        }
        Ok(Self {
            entries,
            source: source.to_string(),
        })
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn take_parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("{}: key {key}: cannot parse {raw:?}: {e}", self.source)),
        }
    }

    /// Fails if any key was never consumed.
    pub fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
            bail!("{}: unknown config keys: {}", self.source, keys.join(", "))
        }
    }
}

macro_rules! take_into {
    ($kv:expr, $cfg:expr, { $($key:ident),+ $(,)? }) => {
        $(if let Some(v) = $kv.take_parse(stringify!($key))? { $cfg.$key = v; })+
    };
}

/// Renders the effective simulator config for the manifest.
fn snapshot(pairs: Vec<(&str, String)>) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn renewal_sim_config(
    mut kv: KvConfig,
    seed_flag: Option<u64>,
) -> Result<(RenewalSimConfig, BTreeMap<String, String>)> {
    let mut cfg = RenewalSimConfig::default();
    take_into!(kv, cfg, {
        n_runs,
        weibull_beta,
        weibull_eta_ref,
        load_life_exponent,
        crack_onset_fraction,
        droop_rate,
        temp_rise_rate,
        load_noise_sd,
        temp_noise_sd,
        seed,
    });
    if let Some(raw) = kv.take("load_range_choices") {
        cfg.load_range_choices = raw
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("load_range_choices: {e}")))
            .collect::<Result<Vec<f64>>>()?;
    }
    kv.finish()?;
    if let Some(seed) = seed_flag {
        cfg.seed = seed;
    }
    let snap = snapshot(vec![
        ("n_runs", cfg.n_runs.to_string()),
        ("weibull_beta", cfg.weibull_beta.to_string()),
        ("weibull_eta_ref", cfg.weibull_eta_ref.to_string()),
        (
            "load_range_choices",
            cfg.load_range_choices
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("load_life_exponent", cfg.load_life_exponent.to_string()),
        ("crack_onset_fraction", cfg.crack_onset_fraction.to_string()),
        ("droop_rate", cfg.droop_rate.to_string()),
        ("temp_rise_rate", cfg.temp_rise_rate.to_string()),
        ("load_noise_sd", cfg.load_noise_sd.to_string()),
        ("temp_noise_sd", cfg.temp_noise_sd.to_string()),
        ("seed", cfg.seed.to_string()),
    ]);
    Ok((cfg, snap))
}

pub fn pump_sim_config(
    mut kv: KvConfig,
    seed_flag: Option<u64>,
) -> Result<(PumpSimConfig, BTreeMap<String, String>)> {
    let mut cfg = PumpSimConfig::default();
    take_into!(kv, cfg, {
        n_pumps,
        horizon_days,
        strong_fraction,
        strong_first_life_mean,
        strong_first_life_spread,
        weak_first_life_mean,
        weak_first_life_spread,
        repair_degradation,
        subsequent_life_spread,
        band_baseline,
        band_escalation,
        measurement_gap_days,
        suspension_prob,
        sudden_prob,
        seed,
    });
    if let Some(raw) = kv.take("band_choice") {
        cfg.band_choice = BandChoice::parse(&raw)?;
    }
    kv.finish()?;
    if let Some(seed) = seed_flag {
        cfg.seed = seed;
    }
    let snap = snapshot(vec![
        ("n_pumps", cfg.n_pumps.to_string()),
        ("horizon_days", cfg.horizon_days.to_string()),
        ("strong_fraction", cfg.strong_fraction.to_string()),
        ("strong_first_life_mean", cfg.strong_first_life_mean.to_string()),
        ("strong_first_life_spread", cfg.strong_first_life_spread.to_string()),
        ("weak_first_life_mean", cfg.weak_first_life_mean.to_string()),
        ("weak_first_life_spread", cfg.weak_first_life_spread.to_string()),
        ("repair_degradation", cfg.repair_degradation.to_string()),
        ("subsequent_life_spread", cfg.subsequent_life_spread.to_string()),
        ("band_baseline", cfg.band_baseline.to_string()),
        ("band_escalation", cfg.band_escalation.to_string()),
        ("band_choice", cfg.band_choice.label().to_string()),
        ("measurement_gap_days", cfg.measurement_gap_days.to_string()),
        ("suspension_prob", cfg.suspension_prob.to_string()),
        ("sudden_prob", cfg.sudden_prob.to_string()),
        ("seed", cfg.seed.to_string()),
    ]);
    Ok((cfg, snap))
}

/// Estimator kinds accepted by `train`, `evaluate` and `compare`.
pub const MODEL_KINDS: [&str; 5] = ["gd", "lm", "lmbr", "grnn", "weibull-baseline"];

/// Builds a [`ModelSpec`] from key=value hyperparameters.
///
/// Shared keys: `hidden` (default: number of inputs), `output_transfer`
/// (`log_sigmoid`/`linear`), `mse_target`, `max_epochs`, `seed`.
/// GD adds `learning_rate` and `momentum`; LM adds `lambda_init` and
/// `lambda_factor`; GRNN takes `spread`.
pub fn build_model_spec(
    kind: &str,
    kv: &mut KvConfig,
    n_inputs: usize,
    default_seed: u64,
    label: Option<String>,
) -> Result<(ModelSpec, BTreeMap<String, String>)> {
    let seed = kv.take_parse::<u64>("seed")?.unwrap_or(default_seed);
    let label = label.unwrap_or_else(|| kind.to_string());
    let mut snap = snapshot(vec![
        ("kind", kind.to_string()),
        ("seed", seed.to_string()),
        ("inputs", n_inputs.to_string()),
    ]);

    let mut mlp_layout = |kv: &mut KvConfig,
                          snap: &mut BTreeMap<String, String>|
     -> Result<MlpLayout> {
        let hidden = kv.take_parse::<usize>("hidden")?.unwrap_or(n_inputs);
        let transfer = match kv.take("output_transfer") {
            Some(raw) => Transfer::parse(&raw)?,
            None => Transfer::LogSigmoid,
        };
        snap.insert("hidden".into(), hidden.to_string());
        snap.insert("output_transfer".into(), transfer.label().to_string());
        Ok(MlpLayout::new(n_inputs, hidden, transfer)?)
    };

    let config = match kind {
        "gd" => {
            let layout = mlp_layout(kv, &mut snap)?;
            let cfg = GdConfig {
                learning_rate: kv.take_parse("learning_rate")?.unwrap_or(0.75),
                momentum: kv.take_parse("momentum")?.unwrap_or(0.9),
                max_epochs: kv.take_parse("max_epochs")?.unwrap_or(300),
                mse_target: kv.take_parse("mse_target")?.unwrap_or(1e-3),
            };
            snap.insert("learning_rate".into(), cfg.learning_rate.to_string());
            snap.insert("momentum".into(), cfg.momentum.to_string());
            snap.insert("max_epochs".into(), cfg.max_epochs.to_string());
            snap.insert("mse_target".into(), cfg.mse_target.to_string());
            EstimatorConfig::GdMomentum { layout, cfg }
        }
        "lm" | "lmbr" => {
            let layout = mlp_layout(kv, &mut snap)?;
            let cfg = LmConfig {
                lambda_init: kv.take_parse("lambda_init")?.unwrap_or(1e-3),
                lambda_factor: kv.take_parse("lambda_factor")?.unwrap_or(10.0),
                max_epochs: kv.take_parse("max_epochs")?.unwrap_or(100),
                mse_target: kv.take_parse("mse_target")?.unwrap_or(1e-3),
                bayesian: kind == "lmbr",
            };
            snap.insert("lambda_init".into(), cfg.lambda_init.to_string());
            snap.insert("lambda_factor".into(), cfg.lambda_factor.to_string());
            snap.insert("max_epochs".into(), cfg.max_epochs.to_string());
            snap.insert("mse_target".into(), cfg.mse_target.to_string());
            if kind == "lmbr" {
                EstimatorConfig::Lmbr { layout, cfg }
            } else {
                EstimatorConfig::Lm { layout, cfg }
            }
        }
        "grnn" => {
            let spread = kv.take_parse("spread")?.unwrap_or(0.1);
            snap.insert("spread".into(), spread.to_string());
            EstimatorConfig::Grnn { spread }
        }
        "weibull-baseline" => EstimatorConfig::WeibullBaseline,
        other => bail!(
            "unknown model kind {other:?} (expected one of {})",
            MODEL_KINDS.join(", ")
        ),
    };

    Ok((
        ModelSpec {
            label,
            seed,
            config,
        },
        snap,
    ))
}

/// Parses a specs file for `compare`: one model per line, whitespace
/// separated key=value tokens, e.g. `label=lm5 kind=lm hidden=5
/// mse_target=0.05`.
pub fn parse_spec_lines(
    text: &str,
    source: &str,
    n_inputs: usize,
    default_seed: u64,
) -> Result<Vec<(ModelSpec, BTreeMap<String, String>)>> {
    let mut specs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let where_ = format!("{source}:{}", i + 1);
        let mut kv = KvConfig::from_tokens(line.split_whitespace(), &where_)?;
        let kind = kv
            .take("kind")
            .ok_or_else(|| anyhow!("{where_}: every spec line needs kind=<model>"))?;
        let label = kv.take("label");
        let (spec, snap) = build_model_spec(&kind, &mut kv, n_inputs, default_seed, label)?;
        kv.finish()?;
        specs.push((spec, snap));
    }
    if specs.is_empty() {
        bail!("{source}: no model specs found");
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_text_with_comments() {
        let kv = KvConfig::parse("# comment\nn_runs = 6\nseed=3\n\n", "test").unwrap();
        let (cfg, snap) = renewal_sim_config(kv, None).unwrap();
        assert_eq!(cfg.n_runs, 6);
        assert_eq!(cfg.seed, 3);
        assert_eq!(snap["n_runs"], "6");
    }

    #[test]
    fn seed_flag_overrides_config() {
        let kv = KvConfig::parse("seed=3", "test").unwrap();
        let (cfg, snap) = renewal_sim_config(kv, Some(99)).unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(snap["seed"], "99");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let kv = KvConfig::parse("n_rns=6", "test").unwrap();
        let err = renewal_sim_config(kv, None).unwrap_err();
        assert!(err.to_string().contains("n_rns"));
    }

    #[test]
    fn model_specs_apply_defaults_per_kind() {
        let mut kv = KvConfig::parse("", "test").unwrap();
        let (spec, snap) = build_model_spec("lm", &mut kv, 5, 42, None).unwrap();
        kv.finish().unwrap();
        assert_eq!(spec.seed, 42);
        match spec.config {
            EstimatorConfig::Lm { layout, cfg } => {
                assert_eq!(layout.n_hidden, 5);
                assert_eq!(cfg.max_epochs, 100);
                assert!(!cfg.bayesian);
            }
            other => panic!("unexpected config {other:?}"),
        }
        assert_eq!(snap["hidden"], "5");
    }

    #[test]
    fn spec_lines_parse_labels_and_overrides() {
        let specs = parse_spec_lines(
            "label=lm5 kind=lm hidden=5 mse_target=0.05\nkind=grnn spread=0.1\n",
            "specs",
            5,
            7,
        )
        .unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].0.label, "lm5");
        assert_eq!(specs[1].0.label, "grnn");
    }

    #[test]
    fn band_choice_parses() {
        let kv = KvConfig::parse("band_choice=2x", "test").unwrap();
        let (cfg, _) = pump_sim_config(kv, None).unwrap();
        assert_eq!(cfg.band_choice, BandChoice::X2);
    }
}
