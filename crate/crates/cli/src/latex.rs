//! LaTeX rendering of exact values.

use num_traits::{One, Signed};

use voatwist::exponent::Exponent;
use voatwist::mpf::MultiPointFunction;
use voatwist::poly::Poly;
use voatwist::rational::{fmt_q, Rational};
use voatwist::series::PuiseuxSeries;

fn latex_q(x: &Rational) -> String {
    if x.is_integer() {
        fmt_q(x)
    } else {
        format!("\\frac{{{}}}{{{}}}", x.numer(), x.denom())
    }
}

fn latex_power(var: &str, e: Exponent) -> String {
    let var = if var.contains('-') { format!("({var})") } else { var.to_string() };
    if e == Exponent::int(1) {
        var
    } else {
        format!("{var}^{{{e}}}")
    }
}

/// A polynomial as signed terms `\frac{a}{b} z^{e} w^{f}`.
pub fn latex_poly(names: &[String], p: &Poly) -> String {
    let mut out = String::new();
    for (m, c) in p.terms() {
        let mono: Vec<String> = m.iter().zip(names).filter(|(e, _)| !e.is_zero()).map(|(e, n)| latex_power(n, *e)).collect();
        let mag = c.abs();
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if mono.is_empty() {
            out.push_str(&latex_q(&mag));
        } else if mag.is_one() {
            out.push_str(&mono.join(" "));
        } else {
            out.push_str(&format!("{} {}", latex_q(&mag), mono.join(" ")));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// A rational function `N / prod (x_i - x_j)^l`.
pub fn latex_mpf(f: &MultiPointFunction) -> String {
    let num = latex_poly(f.vars(), f.numerator());
    if f.diagonal_poles().is_empty() {
        return num;
    }
    let den: Vec<String> = f
        .diagonal_poles()
        .iter()
        .map(|((i, j), l)| {
            let d = format!("({} - {})", f.vars()[*i], f.vars()[*j]);
            if *l == 1 {
                d
            } else {
                format!("{d}^{{{l}}}")
            }
        })
        .collect();
    format!("\\frac{{{num}}}{{{}}}", den.join(" "))
}

/// A truncated series with function coefficients.
pub fn latex_series(s: &PuiseuxSeries<MultiPointFunction>) -> String {
    let terms: Vec<String> = s.terms().map(|(e, c)| format!("\\left({}\\right) {}", latex_mpf(c), latex_power(s.var(), *e))).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use voatwist::rational::q;

    #[test]
    fn fractions_and_signs_render() {
        let names = vec!["z".to_string(), "w".to_string()];
        let mut p = Poly::zero(2);
        p.add_term(vec![Exponent::new(-1, 2), Exponent::int(1)], q(-1, 2));
        p.add_term(vec![Exponent::zero(), Exponent::zero()], q(3, 1));
        let s = latex_poly(&names, &p);
        assert!(s.contains("\\frac{1}{2} z^{-1/2} w"), "{s}");
        assert!(s.contains('3'), "{s}");
    }

    #[test]
    fn diagonal_pole_renders_as_fraction() {
        let f = MultiPointFunction::diagonal_pole(vec!["z".into(), "w".into()], "z", "w", 2);
        assert_eq!(latex_mpf(&f), "\\frac{1}{(z - w)^{2}}");
    }
}
