//! Error taxonomy shared by all subcommands, mapped onto the process exit
//! codes: 1 for configuration and usage problems, 2 for solver failures,
//! 3 for I/O failures. Every error is also emitted to standard error as a
//! single JSON record so wrapping tooling can pick it up without parsing
//! human-oriented text.

use rigsim::model::{Diagnostic, Severity};

#[derive(Debug)]
pub enum CliError {
    /// bad arguments, unparsable or invalid configuration
    User(String),
    /// configuration parsed but failed validation
    Validation(Vec<Diagnostic>),
    /// the MILP backend gave up on a window
    Solver(String),
    /// file system trouble
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) | CliError::Validation(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::User(_) => "config",
            CliError::Validation(_) => "validation",
            CliError::Solver(_) => "solver",
            CliError::Io(_) => "io",
        }
    }

    /// One-line JSON record for standard error.
    pub fn record(&self) -> String {
        let message = match self {
            CliError::User(m) | CliError::Solver(m) | CliError::Io(m) => m.clone(),
            CliError::Validation(diags) => format!(
                "configuration failed validation with {} finding(s)",
                diags.len()
            ),
        };
        let mut record = serde_json::json!({
            "kind": self.kind(),
            "message": message,
        });
        if let CliError::Validation(diags) = self {
            record["diagnostics"] = diags
                .iter()
                .map(|d| {
                    serde_json::json!({
                        "severity": match d.severity {
                            Severity::Error => "error",
                            Severity::Warning => "warning",
                        },
                        "element": d.element,
                        "message": d.message,
                    })
                })
                .collect();
        }
        record.to_string()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub fn io_at(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_are_single_line_json() {
        let err = CliError::Solver("window 12 infeasible".into());
        let record = err.record();
        assert!(!record.contains('\n'));
        let parsed: serde_json::Value = serde_json::from_str(&record).unwrap();
        assert_eq!(parsed["kind"], "solver");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn validation_records_carry_diagnostics() {
        let err = CliError::Validation(vec![Diagnostic {
            severity: Severity::Error,
            element: "gt1".into(),
            message: "f_max must be positive".into(),
        }]);
        let parsed: serde_json::Value = serde_json::from_str(&err.record()).unwrap();
        assert_eq!(parsed["diagnostics"][0]["element"], "gt1");
        assert_eq!(err.exit_code(), 1);
    }
}
