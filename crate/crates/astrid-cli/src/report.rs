//! The machine-readable run report and its text rendering.
//!
//! JSON is the source of truth; the text table is a rounded rendering of
//! the same numbers. The report deliberately excludes anything that varies
//! between identical runs (wall-clock time, thread count), so re-running
//! with the embedded configuration reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use astrid::search::AstridResult;
use astrid::{Dataset, Grouping, TrialConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: DatasetSummary,
    pub classifier: ClassifierSummary,
    pub config: ConfigSummary,
    pub baseline_accuracy: f64,
    pub rows: Vec<ReportRow>,
    pub selected_grouping: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub m: usize,
    pub n_classes: usize,
    pub class_names: Vec<String>,
    pub major_class_proportion: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trees: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feature_subsample: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub train_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub r: usize,
    pub n: usize,
    pub seed: u64,
    pub ci_quantiles: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: usize,
    pub grouping: String,
    pub v: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
}

impl RunReport {
    pub fn new(
        data: &Dataset,
        classifier: ClassifierSummary,
        config: &TrialConfig,
        result: &AstridResult,
    ) -> Self {
        let rows = result
            .trace
            .entries
            .iter()
            .map(|entry| ReportRow {
                k: entry.grouping.cardinality(),
                grouping: entry.grouping.to_string(),
                v: entry.v,
                ci_lower: entry.ci.as_ref().map(|ci| ci.lower),
                ci_upper: entry.ci.as_ref().map(|ci| ci.upper),
                valid: entry.valid,
            })
            .collect();
        RunReport {
            dataset: DatasetSummary {
                n: data.n_rows(),
                m: data.n_attributes(),
                n_classes: data.class_names().len(),
                class_names: data.class_names().to_vec(),
                major_class_proportion: data.major_class_proportion(),
            },
            classifier,
            config: ConfigSummary {
                r: config.r,
                n: config.n,
                seed: config.master_seed,
                ci_quantiles: [config.ci_quantiles.0, config.ci_quantiles.1],
            },
            baseline_accuracy: result.baseline,
            rows,
            selected_grouping: result.selected.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Render the result table: one row per cardinality, group letters
    /// per attribute, an asterisk marking valid factorisations. Accuracies
    /// are rounded to 3 decimals here, never in the JSON.
    pub fn render_text(&self, attribute_names: &[String]) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "dataset: n={} m={} classes={} mcp={:.2}\n",
            self.dataset.n, self.dataset.m, self.dataset.n_classes,
            self.dataset.major_class_proportion
        ));
        out.push_str(&format!(
            "classifier: {}  R={} N={} seed={}\n",
            self.classifier.kind, self.config.r, self.config.n, self.config.seed
        ));
        out.push_str(&format!("a0 = {:.3}\n\n", self.baseline_accuracy));

        let name_width = attribute_names
            .iter()
            .map(|n| n.chars().count())
            .max()
            .unwrap_or(2)
            .min(12);
        let cell = |s: &str| format!("{s:>name_width$} ");

        out.push_str(&format!("{:>3}  {:^16} {:>6}   ", "k", "CI", "V"));
        for name in attribute_names {
            let short: String = name.chars().take(12).collect();
            out.push_str(&cell(&short));
        }
        out.push_str("  grouping\n");

        for row in &self.rows {
            let ci_text = match (row.ci_lower, row.ci_upper) {
                (Some(lo), Some(hi)) => format!("[{lo:.3}, {hi:.3}]"),
                _ => "-".to_string(),
            };
            let mark = match row.valid {
                Some(true) => "*",
                Some(false) => " ",
                None => " ",
            };
            out.push_str(&format!(
                "{:>3}{mark} {ci_text:^16} {:>6.3}   ",
                row.k, row.v
            ));
            let grouping = Grouping::parse(&row.grouping, self.dataset.m)
                .expect("report groupings round-trip");
            let group_of = grouping.group_of_attribute();
            for &g in &group_of {
                let letter = char::from(b'A' + (g % 26) as u8);
                out.push_str(&cell(&letter.to_string()));
            }
            out.push_str(&format!("  {}\n", row.grouping));
        }
        out.push_str(&format!("\nselected: {} (k={})\n", self.selected_grouping,
            self.selected_grouping.split('|').count()));
        out
    }
}
