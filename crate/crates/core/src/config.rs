//! Flat `key = value` configuration shared by every subcommand.
//!
//! One entry per line, `#` starts a comment, keys are dotted with indexed
//! lists (`jumps[0].kind`, `estimators[1].varpi`). Unknown keys are errors.

use crate::error::{Error, Result};
use crate::estimators::{EstimatorConfig, FreqRule};
use crate::models::{minimal_class_bound, Drift, JumpComponent, JumpLaw, LogOuVolatility, ModelSpec, Volatility};
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

/// Raw entries in key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_entry(line).map_err(|e| Error::config(format!("line {}: {e}", i + 1)))?;
            if entries.insert(k.clone(), v).is_some() {
                return Err(Error::config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Apply a `key=value` override, replacing any existing entry.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = split_entry(assignment.trim()).map_err(|e| Error::config(format!("--set {assignment}: {e}")))?;
        self.entries.insert(k, v);
        Ok(())
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

fn split_entry(line: &str) -> std::result::Result<(String, String), String> {
    let (k, v) = line.split_once('=').ok_or("expected `key = value`")?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || k.contains(char::is_whitespace) {
        return Err(format!("malformed key `{k}`"));
    }
    if v.is_empty() {
        return Err(format!("empty value for `{k}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

/// Consumes keys so that leftovers can be reported as unknown.
struct Reader {
    entries: BTreeMap<String, String>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.parse(key)?
            .ok_or_else(|| Error::config(format!("missing key `{key}`")))
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(v) = self.take(key) else { return Ok(None) };
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| Error::config(format!("`{key}`: cannot parse `{s}` as a count")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn seed(&mut self, key: &str) -> Result<Option<u64>> {
        let Some(v) = self.take(key) else { return Ok(None) };
        parse_seed(&v)
            .map(Some)
            .ok_or_else(|| Error::config(format!("`{key}`: cannot parse `{v}` as a seed")))
    }

    /// Number of entries `prefix[0]`, `prefix[1]`, ... present; indices must be dense.
    fn count(&self, prefix: &str) -> Result<usize> {
        let open = format!("{prefix}[");
        let mut max = None;
        let mut seen = std::collections::BTreeSet::new();
        for k in self.entries.keys() {
            let Some(rest) = k.strip_prefix(&open) else { continue };
            let idx = rest
                .split_once(']')
                .and_then(|(i, tail)| tail.starts_with('.').then_some(i))
                .and_then(|i| i.parse::<usize>().ok())
                .ok_or_else(|| Error::config(format!("malformed indexed key `{k}`")))?;
            seen.insert(idx);
            max = max.max(Some(idx));
        }
        match max {
            None => Ok(0),
            Some(m) if seen.len() == m + 1 => Ok(m + 1),
            Some(_) => Err(Error::config(format!("`{prefix}` indices must run 0, 1, 2, ... without gaps"))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.entries.keys().next() {
            None => Ok(()),
            Some(_) => Err(Error::config(format!(
                "unknown key(s): {}",
                self.entries.keys().cloned().collect::<Vec<_>>().join(", ")
            ))),
        }
    }
}

pub fn parse_seed(s: &str) -> Option<u64> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16).ok(),
        None => s.replace('_', "").parse().ok(),
    }
}

/// Everything a config file can describe. Subcommands pick what they need.
#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub model: ModelSpec,
    pub estimators: Vec<EstimatorConfig>,
    pub seed: u64,
    pub threads: Option<usize>,
    /// `simulate.n`
    pub simulate_n: Option<usize>,
    pub n_grid: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub minimax_r: Option<f64>,
    pub minimax_n_grid: Option<Vec<usize>>,
}

impl LabConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let mut rd = Reader {
            entries: map.entries.clone(),
        };
        let model = read_model(&mut rd)?;
        let estimators = read_estimators(&mut rd)?;
        let cfg = LabConfig {
            model,
            estimators,
            seed: rd.seed("seed")?.unwrap_or(0),
            threads: rd.parse("threads")?,
            simulate_n: rd.parse("simulate.n")?,
            n_grid: rd.list("plan.n_grid")?,
            replications: rd.parse("plan.replications")?,
            minimax_r: rd.parse("minimax.r")?,
            minimax_n_grid: rd.list("minimax.n_grid")?,
        };
        rd.finish()?;
        if cfg.threads == Some(0) {
            return Err(Error::config("`threads` must be positive"));
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_map(&ConfigMap::parse(text)?)
    }
}

fn read_model(rd: &mut Reader) -> Result<ModelSpec> {
    let drift = match rd.take("drift.kind").as_deref() {
        None | Some("constant") => Drift::Constant {
            value: rd.or("drift.value", 0.0)?,
        },
        Some("sine") => Drift::Sine {
            level: rd.or("drift.level", 0.0)?,
            amplitude: rd.require("drift.amplitude")?,
            frequency: rd.require("drift.frequency")?,
        },
        Some(other) => return Err(Error::config(format!("unknown drift.kind `{other}`"))),
    };
    let volatility = match rd.take("volatility.kind").as_deref() {
        None | Some("constant") => Volatility::Constant {
            value: rd.or("volatility.value", 1.0)?,
        },
        Some("sine") => Volatility::Sine {
            level: rd.require("volatility.level")?,
            amplitude: rd.require("volatility.amplitude")?,
            frequency: rd.require("volatility.frequency")?,
        },
        Some("stochastic") => Volatility::Stochastic(LogOuVolatility {
            initial: rd.require("volatility.initial")?,
            mean: rd.require("volatility.mean")?,
            reversion: rd.require("volatility.reversion")?,
            vol_of_vol: rd.require("volatility.vol_of_vol")?,
            floor: rd.require("volatility.floor")?,
            cap: rd.require("volatility.cap")?,
        }),
        Some(other) => return Err(Error::config(format!("unknown volatility.kind `{other}`"))),
    };
    let mut jumps = Vec::new();
    for i in 0..rd.count("jumps")? {
        jumps.push(read_jump(rd, &format!("jumps[{i}]"))?);
    }
    let mut model = ModelSpec {
        drift,
        volatility,
        jumps,
        class_r: rd.or("class.r", 0.0)?,
        class_a: 1.0,
    };
    model.validate().map_err(|e| Error::config(e.to_string()))?;
    model.class_a = match rd.take("class.a").as_deref() {
        None | Some("auto") => {
            // smallest passing bound when it is finite, else 1
            let a = minimal_class_bound(&model, model.class_r)?;
            if a.is_finite() && a > 0.0 {
                a
            } else {
                1.0
            }
        }
        Some(v) => v
            .parse()
            .map_err(|_| Error::config(format!("`class.a`: cannot parse `{v}`")))?,
    };
    model.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(model)
}

fn read_jump(rd: &mut Reader, p: &str) -> Result<JumpComponent> {
    let kind = rd.take(&format!("{p}.kind")).ok_or_else(|| Error::config(format!("missing `{p}.kind`")))?;
    match kind.as_str() {
        "compound-poisson" => {
            let l = format!("{p}.law");
            let law = match rd.take(&format!("{l}.kind")).as_deref() {
                Some("fixed") => JumpLaw::Fixed {
                    size: rd.require(&format!("{l}.size"))?,
                },
                Some("symmetric") => JumpLaw::Symmetric {
                    size: rd.require(&format!("{l}.size"))?,
                },
                Some("normal") => JumpLaw::Normal {
                    mean: rd.or(&format!("{l}.mean"), 0.0)?,
                    std: rd.require(&format!("{l}.std"))?,
                },
                Some("uniform") => JumpLaw::Uniform {
                    low: rd.require(&format!("{l}.low"))?,
                    high: rd.require(&format!("{l}.high"))?,
                },
                Some(other) => return Err(Error::config(format!("unknown `{l}.kind` `{other}`"))),
                None => return Err(Error::config(format!("missing `{l}.kind`"))),
            };
            Ok(JumpComponent::CompoundPoisson {
                intensity: rd.require(&format!("{p}.intensity"))?,
                law,
            })
        }
        "symmetric-stable" => Ok(JumpComponent::SymmetricStable {
            beta: rd.require(&format!("{p}.beta"))?,
            scale: rd.or(&format!("{p}.scale"), 1.0)?,
        }),
        "truncated-stable" => Ok(JumpComponent::TruncatedStable {
            beta: rd.require(&format!("{p}.beta"))?,
            scale: rd.or(&format!("{p}.scale"), 1.0)?,
            truncation: rd.require(&format!("{p}.truncation"))?,
        }),
        other => Err(Error::config(format!("unknown `{p}.kind` `{other}`"))),
    }
}

fn read_estimators(rd: &mut Reader) -> Result<Vec<EstimatorConfig>> {
    let mut out = Vec::new();
    for i in 0..rd.count("estimators")? {
        let p = format!("estimators[{i}]");
        let variant = rd
            .take(&format!("{p}.variant"))
            .ok_or_else(|| Error::config(format!("missing `{p}.variant`")))?;
        let cfg = parse_variant(rd, &p, &variant)?;
        cfg.validate().map_err(|e| Error::config(format!("{p}: {e}")))?;
        out.push(cfg);
    }
    Ok(out)
}

fn parse_variant(rd: &mut Reader, p: &str, variant: &str) -> Result<EstimatorConfig> {
    Ok(match variant {
        "realized" => EstimatorConfig::Realized,
        "truncated" => EstimatorConfig::Truncated {
            varpi: rd.require(&format!("{p}.varpi"))?,
            trunc_scale: rd.or(&format!("{p}.trunc_scale"), 1.0)?,
        },
        "multipower" => EstimatorConfig::Multipower {
            k: rd.or(&format!("{p}.k"), 2)?,
        },
        "spectral" => {
            let u: Option<f64> = rd.parse(&format!("{p}.u"))?;
            let r: Option<f64> = rd.parse(&format!("{p}.r"))?;
            let a = rd.take(&format!("{p}.a"));
            let freq = match (u, r) {
                (Some(u), None) if a.is_none() => FreqRule::Explicit { u },
                (None, Some(r)) => FreqRule::Rate {
                    r,
                    a: match a.as_deref() {
                        None | Some("auto") => None,
                        Some(v) => Some(
                            v.parse()
                                .map_err(|_| Error::config(format!("`{p}.a`: cannot parse `{v}`")))?,
                        ),
                    },
                },
                _ => {
                    return Err(Error::config(format!(
                        "{p}: spectral needs either `u`, or `r` with optional `a`"
                    )))
                }
            };
            EstimatorConfig::Spectral { freq }
        }
        other => return Err(Error::config(format!("unknown `{p}.variant` `{other}`"))),
    })
}

/// Render a model as config entries; `LabConfig::parse` reads them back.
pub fn model_entries(model: &ModelSpec) -> ConfigMap {
    let mut m = ConfigMap::default();
    match model.drift {
        Drift::Constant { value } => {
            m.insert("drift.kind", "constant");
            m.insert("drift.value", value);
        }
        Drift::Sine {
            level,
            amplitude,
            frequency,
        } => {
            m.insert("drift.kind", "sine");
            m.insert("drift.level", level);
            m.insert("drift.amplitude", amplitude);
            m.insert("drift.frequency", frequency);
        }
    }
    match model.volatility {
        Volatility::Constant { value } => {
            m.insert("volatility.kind", "constant");
            m.insert("volatility.value", value);
        }
        Volatility::Sine {
            level,
            amplitude,
            frequency,
        } => {
            m.insert("volatility.kind", "sine");
            m.insert("volatility.level", level);
            m.insert("volatility.amplitude", amplitude);
            m.insert("volatility.frequency", frequency);
        }
        Volatility::Stochastic(sv) => {
            m.insert("volatility.kind", "stochastic");
            m.insert("volatility.initial", sv.initial);
            m.insert("volatility.mean", sv.mean);
            m.insert("volatility.reversion", sv.reversion);
            m.insert("volatility.vol_of_vol", sv.vol_of_vol);
            m.insert("volatility.floor", sv.floor);
            m.insert("volatility.cap", sv.cap);
        }
    }
    for (i, j) in model.jumps.iter().enumerate() {
        let p = format!("jumps[{i}]");
        m.insert(format!("{p}.kind"), j.kind_name());
        match *j {
            JumpComponent::CompoundPoisson { intensity, law } => {
                m.insert(format!("{p}.intensity"), intensity);
                let l = format!("{p}.law");
                match law {
                    JumpLaw::Fixed { size } => {
                        m.insert(format!("{l}.kind"), "fixed");
                        m.insert(format!("{l}.size"), size);
                    }
                    JumpLaw::Symmetric { size } => {
                        m.insert(format!("{l}.kind"), "symmetric");
                        m.insert(format!("{l}.size"), size);
                    }
                    JumpLaw::Normal { mean, std } => {
                        m.insert(format!("{l}.kind"), "normal");
                        m.insert(format!("{l}.mean"), mean);
                        m.insert(format!("{l}.std"), std);
                    }
                    JumpLaw::Uniform { low, high } => {
                        m.insert(format!("{l}.kind"), "uniform");
                        m.insert(format!("{l}.low"), low);
                        m.insert(format!("{l}.high"), high);
                    }
                }
            }
            JumpComponent::SymmetricStable { beta, scale } => {
                m.insert(format!("{p}.beta"), beta);
                m.insert(format!("{p}.scale"), scale);
            }
            JumpComponent::TruncatedStable {
                beta,
                scale,
                truncation,
            } => {
                m.insert(format!("{p}.beta"), beta);
                m.insert(format!("{p}.scale"), scale);
                m.insert(format!("{p}.truncation"), truncation);
            }
        }
    }
    m.insert("class.r", model.class_r);
    m.insert("class.a", model.class_a);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = "
# unit Brownian plus two jump components
volatility.value = 1
jumps[0].kind = compound-poisson
jumps[0].intensity = 5
jumps[0].law.kind = symmetric
jumps[0].law.size = 1
jumps[1].kind = symmetric-stable
jumps[1].beta = 1.5
class.r = 1.6

estimators[0].variant = realized
estimators[1].variant = truncated
estimators[1].varpi = 0.4
estimators[1].trunc_scale = 4
estimators[2].variant = spectral
estimators[2].r = 1.6
estimators[2].a = auto
estimators[3].variant = spectral
estimators[3].u = 12.5

plan.n_grid = 256, 1024, 4096
plan.replications = 100
seed = 0x5eed
";

    #[test]
    fn parses_sample() {
        let c = LabConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.model.jumps.len(), 2);
        assert_eq!(c.model.class_r, 1.6);
        let a = minimal_class_bound(&c.model, 1.6).unwrap();
        assert_eq!(c.model.class_a, a);
        assert_eq!(
            c.estimators,
            vec![
                EstimatorConfig::Realized,
                EstimatorConfig::Truncated { varpi: 0.4, trunc_scale: 4.0 },
                EstimatorConfig::Spectral {
                    freq: FreqRule::Rate { r: 1.6, a: None }
                },
                EstimatorConfig::Spectral {
                    freq: FreqRule::Explicit { u: 12.5 }
                },
            ]
        );
        assert_eq!(c.n_grid, Some(vec![256, 1024, 4096]));
        assert_eq!(c.replications, Some(100));
        assert_eq!(c.seed, 0x5eed);
    }

    #[test]
    fn empty_is_unit_brownian() {
        let c = LabConfig::parse("").unwrap();
        assert_eq!(c.model, ModelSpec::brownian(1.0));
        assert!(c.estimators.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "volatility.valu = 1",
            "no equals sign",
            "seed = 1\nseed = 2",
            "jumps[1].kind = symmetric-stable\njumps[1].beta = 1",
            "jumps[0].kind = symmetric-stable",
            "jumps[0].kind = symmetric-stable\njumps[0].beta = 2.5",
            "estimators[0].variant = spectral\nestimators[0].u = 1\nestimators[0].r = 1.5",
            "estimators[0].variant = truncated\nestimators[0].varpi = 0.7",
            "volatility.value = abc",
            "plan.n_grid = 1,two,3",
            "drift.kind = wobbly",
            "threads = 0",
        ] {
            let e = LabConfig::parse(text).unwrap_err();
            assert!(matches!(e, Error::Config(_)), "{text}: {e}");
        }
    }

    #[test]
    fn overrides_replace() {
        let mut m = ConfigMap::parse(SAMPLE).unwrap();
        m.set("plan.replications=7").unwrap();
        m.set("estimators[1].varpi = 0.3").unwrap();
        let c = LabConfig::from_map(&m).unwrap();
        assert_eq!(c.replications, Some(7));
        assert_eq!(c.estimators[1], EstimatorConfig::Truncated { varpi: 0.3, trunc_scale: 4.0 });
        assert!(m.set("novalue").is_err());
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0x10"), Some(16));
        assert_eq!(parse_seed("1_000"), Some(1000));
        assert_eq!(parse_seed("-1"), None);
    }

    fn any_law() -> impl Strategy<Value = JumpLaw> {
        prop_oneof![
            (-5.0f64..5.0).prop_map(|size| JumpLaw::Fixed { size }),
            (-5.0f64..5.0).prop_map(|size| JumpLaw::Symmetric { size }),
            (-5.0f64..5.0, 0.0f64..3.0).prop_map(|(mean, std)| JumpLaw::Normal { mean, std }),
            (-5.0f64..0.0, 0.0f64..5.0).prop_map(|(low, high)| JumpLaw::Uniform { low, high }),
        ]
    }

    fn any_jump() -> impl Strategy<Value = JumpComponent> {
        prop_oneof![
            (0.0f64..50.0, any_law()).prop_map(|(intensity, law)| JumpComponent::CompoundPoisson { intensity, law }),
            (0.05f64..1.95, 0.0f64..3.0).prop_map(|(beta, scale)| JumpComponent::SymmetricStable { beta, scale }),
            (0.05f64..1.95, 0.0f64..3.0, 0.01f64..4.0).prop_map(|(beta, scale, truncation)| {
                JumpComponent::TruncatedStable {
                    beta,
                    scale,
                    truncation,
                }
            }),
        ]
    }

    fn any_model() -> impl Strategy<Value = ModelSpec> {
        let drift = prop_oneof![
            (-3.0f64..3.0).prop_map(|value| Drift::Constant { value }),
            (-3.0f64..3.0, -3.0f64..3.0, 0.0f64..5.0).prop_map(|(level, amplitude, frequency)| Drift::Sine {
                level,
                amplitude,
                frequency
            }),
        ];
        let vol = prop_oneof![
            (0.0f64..4.0).prop_map(|value| Volatility::Constant { value }),
            (0.0f64..2.0, 0.0f64..1.0, 0.0f64..5.0).prop_map(|(amplitude, extra, frequency)| Volatility::Sine {
                level: amplitude + extra,
                amplitude,
                frequency
            }),
            (0.1f64..1.0, 1.0f64..2.0, 0.1f64..5.0, 0.0f64..1.0).prop_map(|(floor, cap, reversion, vol_of_vol)| {
                Volatility::Stochastic(LogOuVolatility {
                    initial: floor,
                    mean: cap,
                    reversion,
                    vol_of_vol,
                    floor,
                    cap,
                })
            }),
        ];
        (drift, vol, prop::collection::vec(any_jump(), 0..4), 0.0f64..1.99, 0.01f64..100.0).prop_map(
            |(drift, volatility, jumps, class_r, class_a)| ModelSpec {
                drift,
                volatility,
                jumps,
                class_r,
                class_a,
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn model_round_trip(model in any_model()) {
            let text = model_entries(&model).render();
            let back = LabConfig::parse(&text).unwrap();
            prop_assert_eq!(back.model, model);
        }
    }
}
