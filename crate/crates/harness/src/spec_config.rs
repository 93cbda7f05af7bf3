//! Declarative perturbation-model files.
//!
//! ```toml
//! budget = "1.0%"            # count ("13"), percentage ("1.0%") or fraction ("0.01")
//!
//! [[rule]]                   # evaluated in order, last match wins
//! label = -1.0               # optional: only samples with this label
//! delta = [0.0, 2.0]         # allowed label change, must contain 0
//! when = [{ feature = "sex=F", op = "==", value = 1.0 }]
//!
//! [[group]]                  # subgroups reported separately
//! name = "women"
//! when = [{ feature = "sex=F", op = "==", value = 1.0 }]
//! ```
//!
//! `preset = "label-flip"` adds the two rules letting any binary label flip.
//! `preset = "promote"` / `"demote"` with a `[target_group]` table restrict
//! flips to one group and one direction.

use std::fs;
use std::path::Path;

use multirobust_core::{
    materialize_spec, BiasRule, Budget, Comparison, Dataset, FeatureCondition, Interval,
    MultiplicitySpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureRef {
    Index(usize),
    Name(String),
}

impl FeatureRef {
    fn resolve(&self, names: &[String]) -> Result<usize> {
        match self {
            FeatureRef::Index(i) if *i < names.len() => Ok(*i),
            FeatureRef::Index(i) => Err(HarnessError::Config(format!(
                "feature index {i} out of range ({} features)",
                names.len()
            ))),
            FeatureRef::Name(n) => names
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| HarnessError::Config(format!("unknown feature {n:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDef {
    pub feature: FeatureRef,
    #[serde(default = "default_op")]
    pub op: String,
    pub value: f64,
}

fn default_op() -> String {
    "==".into()
}

fn parse_op(op: &str) -> Result<Comparison> {
    Ok(match op {
        "==" | "=" => Comparison::Eq,
        "!=" => Comparison::Ne,
        "<" => Comparison::Lt,
        "<=" => Comparison::Le,
        ">" => Comparison::Gt,
        ">=" => Comparison::Ge,
        other => return Err(HarnessError::Config(format!("unknown comparison {other:?}"))),
    })
}

impl ConditionDef {
    fn resolve(&self, names: &[String]) -> Result<FeatureCondition> {
        Ok(FeatureCondition {
            feature: self.feature.resolve(names)?,
            cmp: parse_op(&self.op)?,
            threshold: self.value,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDef {
    #[serde(default)]
    pub when: Vec<ConditionDef>,
    #[serde(default)]
    pub label: Option<f64>,
    pub delta: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDef {
    pub name: String,
    pub when: Vec<ConditionDef>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetGroup {
    pub feature: FeatureRef,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    LabelFlip,
    Promote,
    Demote,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    #[serde(default)]
    pub budget: Option<String>,
    #[serde(default)]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub target_group: Option<TargetGroup>,
    #[serde(default, rename = "rule")]
    pub rules: Vec<RuleDef>,
    #[serde(default, rename = "group")]
    pub groups: Vec<GroupDef>,
}

/// A named subgroup predicate over test-point features.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub name: String,
    pub conditions: Vec<FeatureCondition>,
}

impl Group {
    pub fn matches(&self, row: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.cmp.holds(row[c.feature], c.threshold))
    }
}

impl SpecConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn label_flip() -> Self {
        SpecConfig {
            preset: Some(Preset::LabelFlip),
            ..Default::default()
        }
    }

    /// Resolves every rule against the feature names.
    pub fn rules(&self, names: &[String]) -> Result<Vec<BiasRule>> {
        let mut out = Vec::new();
        if let Some(p) = self.preset {
            match p {
                Preset::LabelFlip => out.extend(BiasRule::label_flips()),
                Preset::Promote | Preset::Demote => {
                    let g = self.target_group.as_ref().ok_or_else(|| {
                        HarnessError::Config("promote/demote presets need [target_group]".into())
                    })?;
                    let f = g.feature.resolve(names)?;
                    out.push(if p == Preset::Promote {
                        BiasRule::promote(f, g.value)
                    } else {
                        BiasRule::demote(f, g.value)
                    });
                }
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            let delta = Interval::new(r.delta[0], r.delta[1]).ok_or_else(|| {
                HarnessError::Config(format!("rule {i}: delta {:?} is not an interval", r.delta))
            })?;
            let conditions = r
                .when
                .iter()
                .map(|c| c.resolve(names))
                .collect::<Result<Vec<_>>>()?;
            out.push(BiasRule::new(conditions, r.label, delta));
        }
        Ok(out)
    }

    pub fn groups(&self, names: &[String]) -> Result<Vec<Group>> {
        self.groups
            .iter()
            .map(|g| {
                Ok(Group {
                    name: g.name.clone(),
                    conditions: g
                        .when
                        .iter()
                        .map(|c| c.resolve(names))
                        .collect::<Result<Vec<_>>>()?,
                })
            })
            .collect()
    }

    /// The file's budget, unless overridden.
    pub fn budget(&self, override_budget: Option<Budget>) -> Result<Budget> {
        match (override_budget, &self.budget) {
            (Some(b), _) => Ok(b),
            (None, Some(s)) => parse_budget(s),
            (None, None) => Ok(Budget::Count(0)),
        }
    }

    /// Evaluates the rules on `data`, whose columns are named by `names`.
    pub fn materialize(
        &self,
        data: &Dataset,
        names: &[String],
        budget: Budget,
    ) -> Result<MultiplicitySpec> {
        Ok(materialize_spec(data, &self.rules(names)?, budget)?)
    }
}

/// `"13"` is a count, `"1.5%"` a percentage, `"0.015"` a fraction.
pub fn parse_budget(s: &str) -> Result<Budget> {
    let s = s.trim();
    let bad = || HarnessError::Config(format!("cannot parse budget {s:?}"));
    if let Some(p) = s.strip_suffix('%') {
        let v: f64 = p.trim().parse().map_err(|_| bad())?;
        return Ok(Budget::Fraction(v / 100.0));
    }
    if let Ok(k) = s.parse::<usize>() {
        return Ok(Budget::Count(k));
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    Ok(Budget::Fraction(v))
}

pub fn parse_budget_list(s: &str) -> Result<Vec<Budget>> {
    s.split(',').map(parse_budget).collect()
}
