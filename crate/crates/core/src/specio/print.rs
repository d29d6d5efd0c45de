use crate::arith::{MatC, MatRF, RatFun};
use crate::opalg::DiffOp;

/// Canonical text of a rational function in `var`.
pub fn print_ratfun(f: &RatFun, var: &str) -> String {
    f.fmt_in(var)
}

/// Canonical text of a matrix of rational functions in `var`.
pub fn print_matrix(m: &MatRF, var: &str) -> String {
    m.fmt_with(|e| e.fmt_in(var))
}

pub fn print_const_matrix(m: &MatC) -> String {
    m.to_string()
}

fn coeff_text(a: &MatRF) -> String {
    if a.shape() == (1, 1) {
        format!("({})", a.get(0, 0).fmt_in("x"))
    } else {
        print_matrix(a, "x")
    }
}

/// Canonical operator text, lowest order first: `A0 + dx*A1 + dx^2*A2`.
pub fn print_op(d: &DiffOp) -> String {
    let parts: Vec<String> = d
        .terms()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(j, a)| match j {
            0 => coeff_text(a),
            1 => format!("dx*{}", coeff_text(a)),
            _ => format!("dx^{j}*{}", coeff_text(a)),
        })
        .collect();
    if parts.is_empty() {
        return coeff_text(&MatRF::zeros(d.rows(), d.cols()));
    }
    parts.join(" + ")
}
