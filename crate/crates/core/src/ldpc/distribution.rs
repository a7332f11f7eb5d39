use super::LdpcError;

const SUM_TOLERANCE: f64 = 1e-9;

/// Edge-perspective degree distribution pair `(λ, ρ)` of an LDPC ensemble.
///
/// Each entry is `(degree, coefficient)`; `λ_i` is the fraction of edges
/// attached to variable nodes of degree `i` and `ρ_j` likewise for checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    lambda: Vec<(usize, f64)>,
    rho: Vec<(usize, f64)>,
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<(usize, f64)>, rho: Vec<(usize, f64)>) -> Result<Self, LdpcError> {
        let dist = DegreeDistribution {
            lambda: normalize_terms(lambda),
            rho: normalize_terms(rho),
        };
        dist.validate()?;
        Ok(dist)
    }

    /// Regular `(dv, dc)` ensemble.
    pub fn regular(variable_degree: usize, check_degree: usize) -> Result<Self, LdpcError> {
        Self::new(vec![(variable_degree, 1.0)], vec![(check_degree, 1.0)])
    }

    /// Default rate-0.6 ensemble: `λ(x) = x²`, `ρ(x) = (7/15)x⁶ + (8/15)x⁷`.
    pub fn default_rate_0_6() -> Self {
        Self::new(vec![(3, 1.0)], vec![(7, 7.0 / 15.0), (8, 8.0 / 15.0)])
            .expect("default distribution is valid")
    }

    pub fn lambda(&self) -> &[(usize, f64)] {
        &self.lambda
    }

    pub fn rho(&self) -> &[(usize, f64)] {
        &self.rho
    }

    /// `Σ λ_i / i`, the reciprocal of the mean variable degree.
    pub fn lambda_integral(&self) -> f64 {
        integral(&self.lambda)
    }

    /// `Σ ρ_j / j`, the reciprocal of the mean check degree.
    pub fn rho_integral(&self) -> f64 {
        integral(&self.rho)
    }

    /// Node-perspective variable fractions `(degree, fraction of nodes)`.
    pub fn variable_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.lambda)
    }

    /// Node-perspective check fractions `(degree, fraction of nodes)`.
    pub fn check_node_fractions(&self) -> Vec<(usize, f64)> {
        node_fractions(&self.rho)
    }

    /// Parses a distribution from text lines of the form
    /// `lambda <degree> <coefficient>` or `rho <degree> <coefficient>`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, LdpcError> {
        let mut lambda = Vec::new();
        let mut rho = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |what: &str| {
                LdpcError::Distribution(format!("line {}: {what}: {raw:?}", lineno + 1))
            };
            if fields.len() != 3 {
                return Err(bad("expected `lambda|rho <degree> <coefficient>`"));
            }
            let degree: usize = fields[1].parse().map_err(|_| bad("bad degree"))?;
            let coef = parse_coefficient(fields[2]).ok_or_else(|| bad("bad coefficient"))?;
            match fields[0] {
                "lambda" => lambda.push((degree, coef)),
                "rho" => rho.push((degree, coef)),
                _ => return Err(bad("unknown polynomial")),
            }
        }
        Self::new(lambda, rho)
    }

    /// Text form accepted by [`DegreeDistribution::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (d, c) in &self.lambda {
            out.push_str(&format!("lambda {d} {c}\n"));
        }
        for (d, c) in &self.rho {
            out.push_str(&format!("rho {d} {c}\n"));
        }
        out
    }

    fn validate(&self) -> Result<(), LdpcError> {
        check_polynomial("lambda", &self.lambda, 1)?;
        check_polynomial("rho", &self.rho, 2)?;
        let rate = 1.0 - self.rho_integral() / self.lambda_integral();
        if !(rate > 0.0 && rate < 1.0) {
            return Err(LdpcError::Distribution(format!(
                "design rate {rate} outside (0, 1)"
            )));
        }
        Ok(())
    }
}

/// Design rate `1 - (Σ ρ_j/j) / (Σ λ_i/i)` of the ensemble.
pub fn design_rate(dist: &DegreeDistribution) -> f64 {
    1.0 - dist.rho_integral() / dist.lambda_integral()
}

// Accepts plain decimals and `a/b` fractions.
fn parse_coefficient(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.parse().ok()?;
            let den: f64 = den.parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => s.parse().ok(),
    }
}

// Merges repeated degrees, drops zero terms and sorts by degree.
fn normalize_terms(terms: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut merged = std::collections::BTreeMap::new();
    for (d, c) in terms {
        *merged.entry(d).or_insert(0.0) += c;
    }
    merged.into_iter().filter(|&(_, c)| c != 0.0).collect()
}

fn check_polynomial(name: &str, terms: &[(usize, f64)], min_degree: usize) -> Result<(), LdpcError> {
    if terms.is_empty() {
        return Err(LdpcError::Distribution(format!("{name} has no terms")));
    }
    for &(d, c) in terms {
        if d < min_degree {
            return Err(LdpcError::Distribution(format!(
                "{name} degree {d} below minimum {min_degree}"
            )));
        }
        if !(0.0..=1.0).contains(&c) || c.is_nan() {
            return Err(LdpcError::Distribution(format!(
                "{name} coefficient {c} outside [0, 1]"
            )));
        }
    }
    let sum: f64 = terms.iter().map(|&(_, c)| c).sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(LdpcError::Distribution(format!(
            "{name} coefficients sum to {sum}, not 1"
        )));
    }
    Ok(())
}

fn integral(terms: &[(usize, f64)]) -> f64 {
    terms.iter().map(|&(d, c)| c / d as f64).sum()
}

fn node_fractions(terms: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let total = integral(terms);
    terms
        .iter()
        .map(|&(d, c)| (d, c / d as f64 / total))
        .collect()
}
