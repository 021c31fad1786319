//! Language fragments and the membership predicate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::term::{Const, Term, TermKind};
use crate::types::Type;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Lang {
    B,
    Pcf,
    PcfByval,
    T,
    TMin,
    W,
    T0Str,
    T0StrMin,
    W0Str,
}

/// A language with an optional level cap on constant type parameters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct LangTag {
    pub lang: Lang,
    pub cap: Option<usize>,
}

impl LangTag {
    pub const B: LangTag = LangTag::of(Lang::B);
    pub const PCF: LangTag = LangTag::of(Lang::Pcf);
    pub const PCF_BYVAL: LangTag = LangTag::of(Lang::PcfByval);
    pub const T: LangTag = LangTag::of(Lang::T);
    pub const T_MIN: LangTag = LangTag::of(Lang::TMin);
    pub const W: LangTag = LangTag::of(Lang::W);
    pub const T0_STR: LangTag = LangTag::of(Lang::T0Str);
    pub const T0_STR_MIN: LangTag = LangTag::of(Lang::T0StrMin);
    pub const W0_STR: LangTag = LangTag::of(Lang::W0Str);

    pub const ALL: [LangTag; 9] = [
        LangTag::B,
        LangTag::PCF,
        LangTag::PCF_BYVAL,
        LangTag::T,
        LangTag::T_MIN,
        LangTag::W,
        LangTag::T0_STR,
        LangTag::T0_STR_MIN,
        LangTag::W0_STR,
    ];

    pub const fn of(lang: Lang) -> LangTag {
        LangTag { lang, cap: None }
    }

    pub fn capped(self, k: usize) -> LangTag {
        LangTag { lang: self.lang, cap: Some(k) }
    }

    fn name(self) -> &'static str {
        match self.lang {
            Lang::B => "b",
            Lang::Pcf => "pcf",
            Lang::PcfByval => "pcf-byval",
            Lang::T => "t",
            Lang::TMin => "t-min",
            Lang::W => "w",
            Lang::T0Str => "t0-str",
            Lang::T0StrMin => "t0-str-min",
            Lang::W0Str => "w0-str",
        }
    }

    fn cap_ok(self, ty: &Type) -> bool {
        self.cap.is_none_or(|k| ty.level() <= k)
    }

    fn strict(self) -> bool {
        matches!(self.lang, Lang::T0Str | Lang::T0StrMin | Lang::W0Str)
    }

    /// Library constants are admitted wherever they have a definition.
    fn admits_lib(self) -> bool {
        !matches!(self.lang, Lang::B | Lang::W0Str)
    }

    pub fn admits(self, k: &Const) -> bool {
        use Lang::*;
        let l = self.lang;
        match k {
            Const::Suc | Const::Pre => true,
            Const::Ifzero(_) => true,
            Const::Y(s) => matches!(l, Pcf | PcfByval) && self.cap_ok(s),
            Const::While(s) => l == W && self.cap_ok(s),
            Const::Rec(s) => matches!(l, T | TMin) && self.cap_ok(s),
            Const::Min => matches!(l, TMin | T0StrMin),
            Const::Byval(ss, t) => {
                if self.strict() {
                    ss.is_empty() && t.level() == 0
                } else {
                    l == PcfByval
                }
            }
            Const::RecStr(s) => matches!(l, T0Str | T0StrMin) && s.level() == 0,
            Const::WhileStr(s) => l == W0Str && s.level() == 0,
            Const::Lib(_) => self.admits_lib(),
        }
    }

    pub fn contains(self, t: &Term) -> bool {
        self.check(t).is_ok()
    }

    /// Checks membership, naming the first offending constant.
    pub fn check(self, t: &Term) -> Result<()> {
        let mut bad = None;
        t.for_each_subterm(|s| {
            if bad.is_none() {
                if let TermKind::Const(k) = s.kind() {
                    if !self.admits(k) {
                        bad = Some(s.clone());
                    }
                }
            }
        });
        match bad {
            None => Ok(()),
            Some(s) => Err(Error::Membership { lang: self.to_string(), subterm: s.to_string() }),
        }
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cap {
            None => write!(f, "{}", self.name()),
            Some(k) => write!(f, "{}@{k}", self.name()),
        }
    }
}

impl FromStr for LangTag {
    type Err = Error;

    /// Accepts e.g. `pcf`, `PCF_byval`, `t-min`, `t0_str_min`, `w@1`.
    fn from_str(s: &str) -> Result<LangTag> {
        let (base, cap) = match s.split_once('@') {
            Some((b, k)) => {
                let k: usize = k.parse().map_err(|_| Error::Usage(format!("bad level cap in '{s}'")))?;
                (b, Some(k))
            }
            None => (s, None),
        };
        let norm = base.to_ascii_lowercase().replace('_', "-").replace('+', "-");
        let lang = match norm.as_str() {
            "b" => Lang::B,
            "pcf" => Lang::Pcf,
            "pcf-byval" => Lang::PcfByval,
            "t" => Lang::T,
            "t-min" => Lang::TMin,
            "w" => Lang::W,
            "t0-str" => Lang::T0Str,
            "t0-str-min" => Lang::T0StrMin,
            "w0-str" => Lang::W0Str,
            _ => return Err(Error::Usage(format!("unknown language '{s}'"))),
        };
        Ok(LangTag { lang, cap })
    }
}
