//! Structured pass/fail records shared by the verification suite and the CLI.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Detail {
    pub description: String,
    pub location: String,
    pub observed: String,
    pub expected: String,
}

/// Pass/fail record with max-error metrics; the output of every suite check
/// and CLI command. Serializes to JSON losslessly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub status: Status,
    pub max_error: f64,
    pub details: Vec<Detail>,
    pub paper_anchor: String,
}

impl VerificationReport {
    pub fn new(check_name: &str, anchor: &str) -> VerificationReport {
        VerificationReport {
            check_name: check_name.to_string(),
            status: Status::Pass,
            max_error: 0.0,
            details: Vec::new(),
            paper_anchor: anchor.to_string(),
        }
    }

    pub fn record_error(&mut self, err: f64) {
        if err.is_nan() {
            self.max_error = f64::NAN;
        } else if self.max_error.is_nan() || err > self.max_error {
            self.max_error = err;
        }
    }

    pub fn fail(&mut self, description: &str, location: &str, observed: &str, expected: &str) {
        self.status = Status::Fail;
        self.details.push(Detail {
            description: description.to_string(),
            location: location.to_string(),
            observed: observed.to_string(),
            expected: expected.to_string(),
        });
    }

    pub fn undecided(&mut self, description: &str) {
        if self.status == Status::Pass {
            self.status = Status::Undecided;
        }
        self.details.push(Detail {
            description: description.to_string(),
            location: String::new(),
            observed: String::new(),
            expected: String::new(),
        });
    }

    pub fn note(&mut self, description: &str, location: &str, observed: &str, expected: &str) {
        self.details.push(Detail {
            description: description.to_string(),
            location: location.to_string(),
            observed: observed.to_string(),
            expected: expected.to_string(),
        });
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_round_trips() {
        let mut r = VerificationReport::new("example/check", "topic");
        r.record_error(3.5e-7);
        r.note("a note", "(0, 0)", "-", "-");
        r.fail("mismatch", "(1, 2)", "0.5", "0.0");
        let json = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
        assert_eq!(back.status, Status::Fail);
        assert!(json.contains("\"status\":\"fail\""));
    }
}
