use std::fmt;

/// Evaluation rules, named as in the usual presentation of faceted execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Const,
    Var,
    Lambda,
    Apply,
    Box,
    Unbox,
    Set,
    FacCreateSplit,
    FacCreatePos,
    FacCreateNeg,
    LetLabel,
    Obs,
    If,
    IfSplit,
    IfStar,
    Begin,
    AppStar,
    AppBase,
    AppPrim,
    AppSplit,
    AppFacetPos,
    AppFacetNeg,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Const => "Const",
            Rule::Var => "Var",
            Rule::Lambda => "Lambda",
            Rule::Apply => "Apply",
            Rule::Box => "Box",
            Rule::Unbox => "Unbox",
            Rule::Set => "Set",
            Rule::FacCreateSplit => "Fac-Create-Split",
            Rule::FacCreatePos => "Fac-Create-Pos",
            Rule::FacCreateNeg => "Fac-Create-Neg",
            Rule::LetLabel => "Let-Label",
            Rule::Obs => "Obs",
            Rule::If => "If",
            Rule::IfSplit => "If-Split",
            Rule::IfStar => "If-Star",
            Rule::Begin => "Begin",
            Rule::AppStar => "App-Star",
            Rule::AppBase => "App-Base",
            Rule::AppPrim => "App-Prim",
            Rule::AppSplit => "App-Split",
            Rule::AppFacetPos => "App-Facet-Pos",
            Rule::AppFacetNeg => "App-Facet-Neg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: Rule,
    pub pc: String,
    pub value: String,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} => {}", self.rule.name(), self.pc, self.value)
    }
}
