//! Machine-readable reports. Field order is fixed so that output diffs cleanly.

use serde::Serialize;
use serde_json::Value;

use crate::analysis::Status;

pub const DEPTH_NOTE: &str = "checked on finite quotients only; a pass is evidence at this depth, not a proof for all depths";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub claim: String,
    pub status: Status,
    pub witness: Option<Value>,
    pub depth: usize,
    pub cap_used: usize,
    pub note: &'static str,
    pub details: Value,
}

impl Report {
    pub fn new(claim: impl Into<String>, passed: bool, depth: usize, cap_used: usize) -> Self {
        Report {
            claim: claim.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            witness: None,
            depth,
            cap_used,
            note: DEPTH_NOTE,
            details: Value::Null,
        }
    }

    pub fn with_witness<T: Serialize>(mut self, w: &T) -> Self {
        self.witness = Some(serde_json::to_value(w).expect("serialisable witness"));
        self
    }

    pub fn with_details<T: Serialize>(mut self, d: &T) -> Self {
        self.details = serde_json::to_value(d).expect("serialisable details");
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable report")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_order_is_fixed() {
        let r = Report::new("c", true, 3, 10).with_witness(&"w");
        let s = serde_json::to_string(&r).unwrap();
        let keys = ["\"claim\"", "\"status\"", "\"witness\"", "\"depth\"", "\"cap_used\"", "\"note\"", "\"details\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|p| p[0] < p[1]));
        assert!(s.contains("\"status\":\"pass\""));
    }
}
