//! `key = value` settings files. Keys use the long flag names without dashes
//! prefix, e.g. `omega1 = 0.5` or `step-scale = 0.005`.

use std::collections::BTreeMap;

pub const KNOWN_KEYS: [&str; 11] = [
    "omega0",
    "omega1",
    "theta",
    "theta-deg",
    "t",
    "seed",
    "tol",
    "step-scale",
    "json",
    "out",
    "grid-cap",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("config line {}: expected key = value", n + 1));
            };
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("config line {}: unknown key '{}'", n + 1, k.trim()));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(format!("config line {}: '{key}' set twice", n + 1));
            }
        }
        if values.contains_key("theta") && values.contains_key("theta-deg") {
            return Err("config sets both theta and theta-deg".into());
        }
        Ok(Config { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("config key '{key}': cannot parse '{v}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_ignores_comments() {
        let c = Config::parse("# defaults\nomega1 = 0.25\n\nstep_scale=0.005 # finer\njson = true\n").unwrap();
        assert_eq!(c.get::<f64>("omega1").unwrap(), Some(0.25));
        assert_eq!(c.get::<f64>("step-scale").unwrap(), Some(0.005));
        assert_eq!(c.get::<bool>("json").unwrap(), Some(true));
        assert_eq!(c.get::<f64>("theta").unwrap(), None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::parse("omega1 0.5").is_err());
        assert!(Config::parse("phase = 1").is_err());
        assert!(Config::parse("t = 1\nt = 2").is_err());
        assert!(Config::parse("theta = 0.1\ntheta-deg = 5").is_err());
        assert!(Config::parse("t = abc").unwrap().get::<f64>("t").is_err());
    }
}
