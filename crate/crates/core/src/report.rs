use serde::{Deserialize, Serialize};

use crate::metrics::GateMetrics;
use crate::verify::Verification;

/// One structured record per pass run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pass: String,
    pub input: GateMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<GateMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_bb: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<u32>,
    /// Size guarantee, as a decimal string since it can be huge.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    pub duration_us: u64,
}

impl Report {
    pub fn new(pass: impl Into<String>, input: GateMetrics) -> Self {
        Report {
            pass: pass.into(),
            input,
            output: None,
            delta: None,
            epsilon: None,
            k_bb: None,
            potential: None,
            size_bound: None,
            verification: None,
            duration_us: 0,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Multi-line rendering for people.
    pub fn to_human(&self) -> String {
        let mut out = format!("pass: {}\n", self.pass);
        let m = |g: &GateMetrics| {
            format!(
                "size {}, depth {}, sum-depth {}, product-depth {}, degree {}",
                g.size, g.depth, g.sum_depth, g.product_depth, g.syn_degree
            )
        };
        out += &format!("input: {}\n", m(&self.input));
        if let Some(o) = &self.output {
            out += &format!("output: {}\n", m(o));
        }
        if let Some(d) = self.delta {
            out += &format!("delta: {d}\n");
        }
        if let Some(e) = &self.epsilon {
            out += &format!("epsilon: {e}\n");
        }
        if let Some(k) = self.k_bb {
            out += &format!("k: {k}\n");
        }
        if let Some(p) = self.potential {
            out += &format!("potential: {p}\n");
        }
        if let Some(b) = &self.size_bound {
            out += &format!("size bound: {b}\n");
        }
        if let Some(v) = &self.verification {
            out += &format!("verification: {} ({:?})\n", v.verdict, v.method);
        }
        out += &format!("duration: {} us\n", self.duration_us);
        out
    }
}
