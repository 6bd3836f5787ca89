//! Experiment files.
//!
//! Experiments are TOML documents. Every key is checked before anything
//! runs: unknown keys, wrong types, missing mandatory keys and constraint
//! violations each get their own error code, plus the offending key and
//! line when they can be located.
//!
//! ```toml
//! master_seed = 42          # mandatory
//! runs = 1000               # optional, default 1000
//!
//! [task]
//! kind = "h_to_ai"          # modular | ai_to_h | h_to_ai
//! c = 4                     # sequenced tasks only
//! perpetuation = "rule_based"   # h_to_ai only: rule_based | hallucinatory
//!
//! [human]
//! n = 10
//! k = 2
//! mode = "probabilistic"    # probabilistic | threshold (default probabilistic)
//! tie = "zero"              # threshold only: zero | one (default zero)
//!
//! [ai]
//! n = 50
//! k = 4
//! rule = "uniform"          # uniform | hallucinatory (default uniform)
//! mode = "probabilistic"
//!
//! [capability]              # optional
//! hi = 0.6
//! lo = 0.4
//!
//! [sweep]                   # required by `sweep`
//! axis1 = { param = "n_ai_ratio", values = [1, 2, 3, 4, 5] }
//! axis2 = { param = "k_h_ratio", values = [0.25, 0.5, 1] }
//!
//! [output]                  # optional
//! path = "results.csv"
//! format = "csv"            # csv | json
//! ```

use std::fmt;
use std::path::PathBuf;

use cosearch::{
    AdaptationRule, AgentSpec, Axis, Perpetuation, RngPolicy, SweepParam, SweepSpec, TaskConfig,
    TaskKind, Thresholds, UpdateMode, DEFAULT_RUNS,
};
use serde::Deserialize;
use toml::Spanned;

use crate::envelope::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Syntax,
    UnknownKey,
    TypeMismatch,
    MissingField,
    Constraint,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "E100-syntax",
            ErrorCode::UnknownKey => "E101-unknown-key",
            ErrorCode::TypeMismatch => "E102-type-mismatch",
            ErrorCode::MissingField => "E103-missing-field",
            ErrorCode::Constraint => "E104-constraint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub code: ErrorCode,
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.code.as_str())?;
        if let Some(line) = self.line {
            write!(f, " line {line}")?;
        }
        if let Some(key) = &self.key {
            write!(f, " key `{key}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    master_seed: Spanned<u64>,
    runs: Option<Spanned<u64>>,
    task: RawTask,
    human: RawAgent,
    ai: RawAgent,
    capability: Option<RawCapability>,
    sweep: Option<RawSweep>,
    output: Option<RawOutput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    kind: Spanned<String>,
    c: Option<Spanned<u64>>,
    perpetuation: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    n: Spanned<u64>,
    k: Spanned<u64>,
    rule: Option<Spanned<String>>,
    mode: Option<Spanned<String>>,
    tie: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCapability {
    hi: Spanned<f64>,
    lo: Spanned<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis1: Spanned<RawAxis>,
    axis2: Spanned<RawAxis>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    param: String,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<String>,
    format: Option<Spanned<String>>,
}

/// A fully validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentFile {
    pub task: TaskConfig,
    pub runs: u64,
    pub master_seed: u64,
    pub thresholds: Thresholds,
    pub sweep: Option<(Axis, Axis)>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<Format>,
}

impl ExperimentFile {
    pub fn policy(&self) -> RngPolicy {
        RngPolicy::new(self.master_seed)
    }

    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        self.sweep.as_ref().map(|(a1, a2)| SweepSpec {
            template: self.task,
            axis1: a1.clone(),
            axis2: a2.clone(),
            n_runs: self.runs,
            policy: self.policy(),
            thresholds: self.thresholds,
        })
    }
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn line_of(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    fn constraint<T>(
        &self,
        key: &str,
        spanned: &Spanned<T>,
        message: impl Into<String>,
    ) -> ConfigError {
        ConfigError {
            code: ErrorCode::Constraint,
            key: Some(key.to_string()),
            line: Some(self.line_of(spanned.span().start)),
            message: message.into(),
        }
    }

    fn choice<'s>(
        &self,
        key: &str,
        value: &'s Spanned<String>,
        allowed: &[&str],
    ) -> Result<&'s str, ConfigError> {
        let v = value.get_ref().as_str();
        if allowed.contains(&v) {
            Ok(v)
        } else {
            Err(ConfigError {
                code: ErrorCode::TypeMismatch,
                key: Some(key.to_string()),
                line: Some(self.line_of(value.span().start)),
                message: format!("`{v}` is not one of {allowed:?}"),
            })
        }
    }
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let end = start + message[start..].find('`')?;
    Some(message[start..end].to_string())
}

fn classify(text: &str, err: toml::de::Error) -> ConfigError {
    let message = err.message().to_string();
    let line = err
        .span()
        .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    let code = if message.starts_with("unknown field") {
        ErrorCode::UnknownKey
    } else if message.starts_with("missing field") {
        ErrorCode::MissingField
    } else if message.starts_with("invalid type") || message.starts_with("invalid value") {
        ErrorCode::TypeMismatch
    } else {
        ErrorCode::Syntax
    };
    let key = match code {
        ErrorCode::UnknownKey | ErrorCode::MissingField => backticked(&message),
        _ => None,
    };
    ConfigError {
        code,
        key,
        line,
        message,
    }
}

fn parse_mode(ctx: &Ctx, who: &str, raw: &RawAgent) -> Result<UpdateMode, ConfigError> {
    let mode = match &raw.mode {
        Some(m) => ctx.choice(&format!("{who}.mode"), m, &["probabilistic", "threshold"])?,
        None => "probabilistic",
    };
    match (mode, &raw.tie) {
        ("probabilistic", None) => Ok(UpdateMode::Probabilistic),
        ("probabilistic", Some(t)) => Err(ctx.constraint(
            &format!("{who}.tie"),
            t,
            "tie rule only applies to threshold mode",
        )),
        (_, tie) => {
            let tie_maps_to_one = match tie {
                Some(t) => ctx.choice(&format!("{who}.tie"), t, &["zero", "one"])? == "one",
                None => false,
            };
            Ok(UpdateMode::Threshold { tie_maps_to_one })
        }
    }
}

fn parse_axis(ctx: &Ctx, key: &str, raw: &Spanned<RawAxis>) -> Result<Axis, ConfigError> {
    let a = raw.get_ref();
    let param = match a.param.as_str() {
        "n_ai_ratio" => SweepParam::NAiRatio,
        "k_h_ratio" => SweepParam::KHRatio,
        "c_ratio" => SweepParam::CRatio,
        other => {
            return Err(ConfigError {
                code: ErrorCode::TypeMismatch,
                key: Some(format!("{key}.param")),
                line: Some(ctx.line_of(raw.span().start)),
                message: format!(
                    "`{other}` is not one of [\"n_ai_ratio\", \"k_h_ratio\", \"c_ratio\"]"
                ),
            })
        }
    };
    if a.values.is_empty() {
        return Err(ctx.constraint(key, raw, "axis values must be non-empty"));
    }
    if a.values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(ctx.constraint(key, raw, "axis values must be positive and finite"));
    }
    if a.values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ctx.constraint(key, raw, "axis values must be strictly increasing"));
    }
    Ok(Axis::new(param, a.values.clone()))
}

fn usize_of(v: &Spanned<u64>) -> usize {
    *v.get_ref() as usize
}

pub fn parse_experiment(text: &str) -> Result<ExperimentFile, ConfigError> {
    let raw: RawFile = toml::from_str(text).map_err(|e| classify(text, e))?;
    let ctx = Ctx { text };

    let human_mode = parse_mode(&ctx, "human", &raw.human)?;
    let ai_mode = parse_mode(&ctx, "ai", &raw.ai)?;
    if let Some(r) = &raw.human.rule {
        ctx.choice("human.rule", r, &["heuristic"])?;
    }
    let ai_rule = match &raw.ai.rule {
        Some(r) => match ctx.choice("ai.rule", r, &["uniform", "hallucinatory"])? {
            "hallucinatory" => AdaptationRule::Hallucinatory,
            _ => AdaptationRule::RuleUniform,
        },
        None => AdaptationRule::RuleUniform,
    };

    let (n_h, k_h) = (usize_of(&raw.human.n), usize_of(&raw.human.k));
    let (n_ai, k_ai) = (usize_of(&raw.ai.n), usize_of(&raw.ai.k));
    for (key, n) in [("human.n", &raw.human.n), ("ai.n", &raw.ai.n)] {
        if *n.get_ref() == 0 {
            return Err(ctx.constraint(key, n, "n must be positive"));
        }
    }
    if k_h > n_h - 1 {
        return Err(ctx.constraint(
            "human.k",
            &raw.human.k,
            format!("k must satisfy 0 <= k <= n - 1 = {}", n_h - 1),
        ));
    }
    if k_ai > n_ai - 1 {
        return Err(ctx.constraint(
            "ai.k",
            &raw.ai.k,
            format!("k must satisfy 0 <= k <= n - 1 = {}", n_ai - 1),
        ));
    }
    if n_ai <= n_h {
        return Err(ctx.constraint(
            "ai.n",
            &raw.ai.n,
            format!("|N_AI| > |N_H| violated: ai.n = {n_ai} must exceed human.n = {n_h}"),
        ));
    }

    let kind = ctx.choice(
        "task.kind",
        &raw.task.kind,
        &["modular", "ai_to_h", "h_to_ai"],
    )?;
    let task = match kind {
        "modular" => {
            if let Some(c) = &raw.task.c {
                return Err(ctx.constraint(
                    "task.c",
                    c,
                    "modular tasks have no coevolution window",
                ));
            }
            if let Some(p) = &raw.task.perpetuation {
                return Err(ctx.constraint(
                    "task.perpetuation",
                    p,
                    "perpetuation applies to h_to_ai only",
                ));
            }
            TaskKind::Modular
        }
        seq => {
            let c_sp = raw.task.c.as_ref().ok_or_else(|| ConfigError {
                code: ErrorCode::MissingField,
                key: Some("task.c".into()),
                line: Some(ctx.line_of(raw.task.kind.span().start)),
                message: format!("{seq} tasks need a coevolution window `c`"),
            })?;
            let c = usize_of(c_sp);
            if seq == "ai_to_h" {
                if let Some(p) = &raw.task.perpetuation {
                    return Err(ctx.constraint(
                        "task.perpetuation",
                        p,
                        "perpetuation applies to h_to_ai only",
                    ));
                }
                if c < 1 || c > n_ai - 1 {
                    return Err(ctx.constraint(
                        "task.c",
                        c_sp,
                        format!("c must satisfy 1 <= c <= ai.n - 1 = {}", n_ai - 1),
                    ));
                }
                TaskKind::AiToH { c }
            } else {
                if c < 1 || c > n_h {
                    return Err(ctx.constraint(
                        "task.c",
                        c_sp,
                        format!("c must satisfy 1 <= c <= human.n = {n_h}"),
                    ));
                }
                let perpetuation = match &raw.task.perpetuation {
                    Some(p) => match ctx.choice(
                        "task.perpetuation",
                        p,
                        &["rule_based", "hallucinatory"],
                    )? {
                        "hallucinatory" => Perpetuation::Hallucinatory,
                        _ => Perpetuation::RuleBased,
                    },
                    None => Perpetuation::RuleBased,
                };
                TaskKind::HToAi { c, perpetuation }
            }
        }
    };

    let task = TaskConfig::new(
        task,
        AgentSpec::human(n_h, k_h, human_mode),
        AgentSpec::ai(n_ai, k_ai, ai_mode).with_rule(ai_rule),
    )
    .map_err(|e| ConfigError {
        code: ErrorCode::Constraint,
        key: None,
        line: None,
        message: e.to_string(),
    })?;

    let runs = match &raw.runs {
        Some(r) if *r.get_ref() == 0 => {
            return Err(ctx.constraint("runs", r, "runs must be at least 1"))
        }
        Some(r) => *r.get_ref(),
        None => DEFAULT_RUNS,
    };

    let thresholds = match &raw.capability {
        Some(c) => Thresholds::new(*c.hi.get_ref(), *c.lo.get_ref())
            .map_err(|e| ctx.constraint("capability", &c.hi, e.to_string()))?,
        None => Thresholds::default(),
    };

    let sweep = match &raw.sweep {
        Some(s) => {
            let a1 = parse_axis(&ctx, "sweep.axis1", &s.axis1)?;
            let a2 = parse_axis(&ctx, "sweep.axis2", &s.axis2)?;
            if a1.param == a2.param {
                return Err(ctx.constraint(
                    "sweep.axis2",
                    &s.axis2,
                    "both axes sweep the same parameter",
                ));
            }
            Some((a1, a2))
        }
        None => None,
    };

    let (output_path, output_format) = match &raw.output {
        Some(o) => {
            let format = match &o.format {
                Some(f) => Some(match ctx.choice("output.format", f, &["csv", "json"])? {
                    "json" => Format::Json,
                    _ => Format::Csv,
                }),
                None => None,
            };
            (o.path.as_ref().map(PathBuf::from), format)
        }
        None => (None, None),
    };

    let file = ExperimentFile {
        task,
        runs,
        master_seed: *raw.master_seed.get_ref(),
        thresholds,
        sweep,
        output_path,
        output_format,
    };
    if let (Some(spec), Some(s)) = (file.sweep_spec(), &raw.sweep) {
        // resolve every cell up front so no simulation starts on a bad grid
        spec.resolve()
            .map_err(|e| ctx.constraint("sweep", &s.axis1, e.to_string()))?;
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
master_seed = 42
runs = 1000

[task]
kind = "modular"

[human]
n = 10
k = 2

[ai]
n = 50
k = 4
"#;

    #[test]
    fn minimal_modular() {
        let f = parse_experiment(MINIMAL).unwrap();
        assert_eq!(f.master_seed, 42);
        assert_eq!(f.runs, 1000);
        assert_eq!(f.task.task, TaskKind::Modular);
        assert_eq!(
            (f.task.human.n, f.task.human.k, f.task.ai.n, f.task.ai.k),
            (10, 2, 50, 4)
        );
        assert_eq!(f.task.ai.mode, UpdateMode::Probabilistic);
        assert!(f.sweep.is_none());
    }

    #[test]
    fn equal_sizes_rejected() {
        let text = MINIMAL.replace("n = 50", "n = 10");
        let e = parse_experiment(&text).unwrap_err();
        assert_eq!(e.code, ErrorCode::Constraint);
        assert!(e.message.contains("|N_AI| > |N_H|"), "{e}");
        assert_eq!(e.key.as_deref(), Some("ai.n"));
        assert_eq!(e.line, Some(13));
    }

    #[test]
    fn missing_seed_rejected() {
        let text = MINIMAL.replace("master_seed = 42\n", "");
        let e = parse_experiment(&text).unwrap_err();
        assert_eq!(e.code, ErrorCode::MissingField);
        assert_eq!(e.key.as_deref(), Some("master_seed"));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace("k = 2", "k = 2\nspeed = 3");
        let e = parse_experiment(&text).unwrap_err();
        assert_eq!(e.code, ErrorCode::UnknownKey);
        assert_eq!(e.key.as_deref(), Some("speed"));
        assert_eq!(e.line, Some(11));
    }

    #[test]
    fn type_mismatch_rejected() {
        let text = MINIMAL.replace("runs = 1000", "runs = \"many\"");
        let e = parse_experiment(&text).unwrap_err();
        assert_eq!(e.code, ErrorCode::TypeMismatch);
        assert_eq!(e.line, Some(3));
        let text = MINIMAL.replace("kind = \"modular\"", "kind = \"parallel\"");
        assert_eq!(
            parse_experiment(&text).unwrap_err().code,
            ErrorCode::TypeMismatch
        );
    }

    #[test]
    fn distinct_codes() {
        let codes = [
            ErrorCode::Syntax,
            ErrorCode::UnknownKey,
            ErrorCode::TypeMismatch,
            ErrorCode::MissingField,
            ErrorCode::Constraint,
        ];
        let mut names: Vec<&str> = codes.iter().map(|c| c.as_str()).collect();
        names.dedup();
        assert_eq!(names.len(), codes.len());
        assert_eq!(
            parse_experiment("master_seed = ").unwrap_err().code,
            ErrorCode::Syntax
        );
    }

    #[test]
    fn sequenced_and_sweep() {
        let text = r#"
master_seed = 7
[task]
kind = "h_to_ai"
c = 4
perpetuation = "hallucinatory"
[human]
n = 20
k = 2
mode = "threshold"
tie = "one"
[ai]
n = 40
k = 4
[capability]
hi = 0.7
lo = 0.3
[sweep]
axis1 = { param = "n_ai_ratio", values = [2, 5] }
axis2 = { param = "c_ratio", values = [0.5, 1] }
[output]
path = "out.json"
format = "json"
"#;
        let f = parse_experiment(text).unwrap();
        assert_eq!(
            f.task.task,
            TaskKind::HToAi {
                c: 4,
                perpetuation: Perpetuation::Hallucinatory
            }
        );
        assert_eq!(f.task.human.mode, UpdateMode::THRESHOLD_TIE_ONE);
        assert_eq!(f.runs, DEFAULT_RUNS);
        assert_eq!(f.thresholds, Thresholds { hi: 0.7, lo: 0.3 });
        assert_eq!(f.output_format, Some(Format::Json));
        assert_eq!(f.sweep_spec().unwrap().resolve().unwrap().len(), 4);
    }

    #[test]
    fn constraint_violations() {
        let cases = [
            (MINIMAL.replace("k = 2", "k = 10"), "human.k"),
            (MINIMAL.replace("kind = \"modular\"", "kind = \"modular\"\nc = 2"), "task.c"),
            (MINIMAL.replace("kind = \"modular\"", "kind = \"h_to_ai\"\nc = 11"), "task.c"),
            (MINIMAL.replace("kind = \"modular\"", "kind = \"ai_to_h\"\nc = 50"), "task.c"),
            (MINIMAL.replace("runs = 1000", "runs = 0"), "runs"),
            (MINIMAL.replace("k = 2", "k = 2\ntie = \"one\""), "human.tie"),
            (
                format!("{MINIMAL}[sweep]\naxis1 = {{ param = \"n_ai_ratio\", values = [2, 1] }}\naxis2 = {{ param = \"k_h_ratio\", values = [1] }}\n"),
                "sweep.axis1",
            ),
            (
                format!("{MINIMAL}[sweep]\naxis1 = {{ param = \"n_ai_ratio\", values = [2] }}\naxis2 = {{ param = \"k_h_ratio\", values = [4] }}\n"),
                "sweep",
            ),
        ];
        for (text, key) in cases {
            let e = parse_experiment(&text).unwrap_err();
            assert_eq!(e.code, ErrorCode::Constraint, "{e}");
            assert_eq!(e.key.as_deref(), Some(key), "{e}");
        }
        let missing_c = MINIMAL.replace("kind = \"modular\"", "kind = \"ai_to_h\"");
        assert_eq!(
            parse_experiment(&missing_c).unwrap_err().code,
            ErrorCode::MissingField
        );
    }
}
