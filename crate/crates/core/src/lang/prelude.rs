// SPDX-License-Identifier: Apache-2.0

//! Logical definitions of the common non-primitive functions.
//!
//! `evenp` and `oddp` are also primitives for concrete evaluation; their
//! definitions here are what the symbolic interpreter expands when no
//! preferred definition is registered.

use std::sync::OnceLock;

use super::sexp::read_all;
use super::term::{parse_defun, DefEnv};

const PRELUDE: &str = r#"
(defun identity (x) x)
(defun 1+ (x) (+ x 1))
(defun 1- (x) (- x 1))
(defun atom (x) (not (consp x)))
(defun endp (x) (atom x))
(defun natp (x) (and (integerp x) (<= 0 x)))
(defun posp (x) (and (integerp x) (< 0 x)))
(defun zp (x) (if (natp x) (equal x 0) t))
(defun zip (x) (if (integerp x) (equal x 0) t))
(defun fix (x) (if (acl2-numberp x) x 0))
(defun ifix (x) (if (integerp x) x 0))
(defun nfix (x) (if (natp x) x 0))
(defun iff (a b) (if a (if b t nil) (if b nil t)))
(defun unsigned-byte-p (n x)
  (and (natp n) (integerp x) (<= 0 x) (< x (expt 2 n))))
(defun signed-byte-p (n x)
  (and (posp n) (integerp x)
       (<= (- (expt 2 (- n 1))) x)
       (< x (expt 2 (- n 1)))))
(defun loghead (n x) (logand x (1- (expt 2 (nfix n)))))
(defun evenp (x) (integerp (* x (/ 2))))
(defun oddp (x) (not (evenp x)))
(defun member (x l)
  (cond ((atom l) nil)
        ((equal x (car l)) l)
        (t (member x (cdr l)))))
(defun len (x) (if (consp x) (+ 1 (len (cdr x))) 0))
(defun true-listp (x) (if (consp x) (true-listp (cdr x)) (equal x nil)))
"#;

const PRELUDE_PRIMITIVES: &[&str] = &["evenp", "oddp"];

pub(crate) fn is_prelude_primitive(name: &str) -> bool {
    PRELUDE_PRIMITIVES.contains(&name)
}

pub(crate) fn prelude_defs() -> &'static DefEnv {
    static DEFS: OnceLock<DefEnv> = OnceLock::new();
    DEFS.get_or_init(|| {
        let mut env = DefEnv::empty();
        for (form, _) in read_all(PRELUDE).expect("prelude parses") {
            env.define(parse_defun(&form).expect("prelude defun"))
                .expect("prelude definitions are consistent");
        }
        env
    })
}

/// Names defined by the prelude.
pub fn is_prelude_function(name: &str) -> bool {
    prelude_defs().contains(name)
}
