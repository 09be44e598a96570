//! Conversion of explicit-unit quantity strings ("21.8 MW", "30 min") into
//! the internal conventions: MW, MWh, Sm3/s, Sm3, MPa, minutes, and so on.
//! Every dimensioned config value must carry a unit suffix; a bare number is
//! rejected so unit mistakes fail loudly instead of silently rescaling.

fn split(s: &str) -> Result<(f64, &str), String> {
    let s = s.trim();
    let (num, unit) = match s.find(|c: char| c.is_whitespace()) {
        Some(pos) => (&s[..pos], s[pos..].trim_start()),
        None => {
            // allow forms like "5min" by splitting at the first alpha char
            let pos = s
                .find(|c: char| c.is_alphabetic())
                .ok_or_else(|| format!("'{s}' is missing a unit suffix"))?;
            (&s[..pos], &s[pos..])
        }
    };
    let value: f64 = num
        .parse()
        .map_err(|_| format!("'{num}' is not a number"))?;
    if unit.is_empty() {
        return Err(format!("'{s}' is missing a unit suffix"));
    }
    Ok((value, unit))
}

fn convert(s: &str, table: &[(&str, f64)], what: &str) -> Result<f64, String> {
    let (value, unit) = split(s)?;
    for (name, scale) in table {
        if unit == *name {
            return Ok(value * scale);
        }
    }
    let accepted: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
    Err(format!(
        "'{unit}' is not a {what} unit (accepted: {})",
        accepted.join(", ")
    ))
}

pub fn power_mw(s: &str) -> Result<f64, String> {
    convert(s, &[("MW", 1.0), ("kW", 1e-3), ("GW", 1e3), ("W", 1e-6)], "power")
}

pub fn energy_mwh(s: &str) -> Result<f64, String> {
    convert(s, &[("MWh", 1.0), ("kWh", 1e-3), ("GWh", 1e3)], "energy")
}

pub fn flow_sm3_per_s(s: &str) -> Result<f64, String> {
    convert(
        s,
        &[
            ("Sm3/s", 1.0),
            ("Sm3/h", 1.0 / 3600.0),
            ("Sm3/d", 1.0 / 86400.0),
            ("Sm3/day", 1.0 / 86400.0),
        ],
        "volumetric flow",
    )
}

pub fn volume_sm3(s: &str) -> Result<f64, String> {
    convert(s, &[("Sm3", 1.0)], "standard volume")
}

pub fn pressure_mpa(s: &str) -> Result<f64, String> {
    convert(
        s,
        &[("MPa", 1.0), ("bar", 0.1), ("kPa", 1e-3), ("Pa", 1e-6)],
        "pressure",
    )
}

pub fn minutes(s: &str) -> Result<f64, String> {
    convert(
        s,
        &[
            ("min", 1.0),
            ("s", 1.0 / 60.0),
            ("h", 60.0),
            ("d", 1440.0),
            ("day", 1440.0),
        ],
        "duration",
    )
}

pub fn seconds(s: &str) -> Result<f64, String> {
    convert(s, &[("s", 1.0), ("min", 60.0), ("h", 3600.0)], "duration")
}

pub fn hours(s: &str) -> Result<f64, String> {
    convert(s, &[("h", 1.0), ("min", 1.0 / 60.0), ("s", 1.0 / 3600.0)], "duration")
}

pub fn kelvin(s: &str) -> Result<f64, String> {
    convert(s, &[("K", 1.0)], "temperature")
}

pub fn millimetres(s: &str) -> Result<f64, String> {
    convert(s, &[("mm", 1.0), ("m", 1e3)], "diameter")
}

pub fn kilometres(s: &str) -> Result<f64, String> {
    convert(s, &[("km", 1.0), ("m", 1e-3)], "length")
}

pub fn metres(s: &str) -> Result<f64, String> {
    convert(s, &[("m", 1.0), ("km", 1e3)], "elevation")
}

pub fn mva(s: &str) -> Result<f64, String> {
    convert(s, &[("MVA", 1.0), ("kVA", 1e-3)], "apparent power")
}

pub fn kg_per_s(s: &str) -> Result<f64, String> {
    convert(s, &[("kg/s", 1.0), ("t/h", 1000.0 / 3600.0)], "mass rate")
}

pub fn mj_per_sm3(s: &str) -> Result<f64, String> {
    convert(s, &[("MJ/Sm3", 1.0), ("kWh/Sm3", 3.6)], "calorific value")
}

pub fn kg_per_sm3(s: &str) -> Result<f64, String> {
    convert(s, &[("kg/Sm3", 1.0)], "mass content")
}

pub fn kg_per_m3(s: &str) -> Result<f64, String> {
    convert(s, &[("kg/m3", 1.0)], "density")
}

/// Step counts: either "N steps" directly, or a duration that must come out
/// as a whole number of timesteps.
pub fn steps(s: &str, timestep_minutes: f64) -> Result<usize, String> {
    let (value, unit) = split(s)?;
    let steps = if unit == "steps" || unit == "step" {
        value
    } else {
        let m = minutes(s)?;
        m / timestep_minutes
    };
    let rounded = steps.round();
    if (steps - rounded).abs() > 1e-9 || rounded < 0.0 {
        return Err(format!(
            "'{s}' is not a whole number of {timestep_minutes}-minute steps"
        ));
    }
    Ok(rounded as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_into_internal_units() {
        assert_eq!(power_mw("21.8 MW").unwrap(), 21.8);
        assert_eq!(power_mw("500 kW").unwrap(), 0.5);
        assert_eq!(flow_sm3_per_s("3600 Sm3/h").unwrap(), 1.0);
        // 8600 Sm3/day is the daily-rate form of 0.0995.. Sm3/s
        assert!((flow_sm3_per_s("8600 Sm3/day").unwrap() - 0.09953703703703703).abs() < 1e-15);
        assert_eq!(pressure_mpa("80 bar").unwrap(), 8.0);
        assert_eq!(minutes("2 h").unwrap(), 120.0);
        assert_eq!(energy_mwh("4 MWh").unwrap(), 4.0);
    }

    #[test]
    fn negative_values_pass_through() {
        assert_eq!(power_mw("-4 MW").unwrap(), -4.0);
    }

    #[test]
    fn step_conversion_requires_whole_steps() {
        assert_eq!(steps("30 min", 5.0).unwrap(), 6);
        assert_eq!(steps("24 steps", 5.0).unwrap(), 24);
        assert_eq!(steps("1 d", 5.0).unwrap(), 288);
        assert!(steps("7 min", 5.0).is_err());
    }

    #[test]
    fn missing_or_unknown_units_are_rejected() {
        assert!(power_mw("21.8").is_err());
        let err = power_mw("21.8 bar").unwrap_err();
        assert!(err.contains("not a power unit"), "{err}");
        assert!(power_mw("abc MW").is_err());
    }
}
