pub mod compare;
pub mod export_problem;
pub mod kpi;
pub mod plot;
pub mod simulate;
pub mod validate;
