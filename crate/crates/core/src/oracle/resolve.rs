//! Static resolution of label expressions to the `let-label` site that
//! created them.

use std::collections::{BTreeMap, HashMap};

use super::OracleError;
use crate::reader::{Expr, Program, SiteId, TopLevel};

/// Where each `facet`/`obs` node's label comes from, keyed by node address
/// within the program that was resolved.
#[derive(Debug, Default)]
pub(crate) struct Resolution {
    pub label_sites: HashMap<*const Expr, SiteId>,
    /// Every `let-label` site in the program with its binder name.
    pub sites: BTreeMap<SiteId, String>,
    /// Sites named by at least one `facet` or `obs`.
    pub referenced: BTreeMap<SiteId, String>,
}

type Scope<'a> = Vec<(&'a str, Option<SiteId>)>;

struct Resolver<'a> {
    globals: HashMap<&'a str, Option<SiteId>>,
    out: Resolution,
}

pub(crate) fn resolve(program: &Program) -> Result<Resolution, OracleError> {
    let mut r = Resolver {
        globals: HashMap::new(),
        out: Resolution::default(),
    };
    for item in &program.items {
        if let TopLevel::Define(name, e) = item {
            let site = r.static_site(e, &mut Vec::new());
            r.globals.insert(name, site);
        }
    }
    for item in &program.items {
        let e = match item {
            TopLevel::Define(_, e) | TopLevel::Expr(e) => e,
        };
        r.walk(e, &mut Vec::new())?;
    }
    let mut out = r.out;
    for (site, name) in out.referenced.iter_mut() {
        name.clone_from(&out.sites[site]);
    }
    Ok(out)
}

impl<'a> Resolver<'a> {
    fn lookup(&self, name: &str, scope: &Scope<'a>) -> Option<SiteId> {
        match scope.iter().rev().find(|(n, _)| *n == name) {
            Some((_, site)) => *site,
            None => self.globals.get(name).copied().flatten(),
        }
    }

    /// The site whose label `e` evaluates to, when that is evident from the
    /// syntax alone.
    fn static_site(&self, e: &'a Expr, scope: &mut Scope<'a>) -> Option<SiteId> {
        match e {
            Expr::Var(x) => self.lookup(x, scope),
            Expr::LetLabel { name, body, site, .. } => {
                scope.push((name, Some(*site)));
                let r = self.static_site(body, scope);
                scope.pop();
                r
            }
            Expr::Apply(f, args) => match &**f {
                Expr::Lambda(l) if l.params.len() == args.len() => {
                    let bound: Vec<_> = args.iter().map(|a| self.static_site(a, scope)).collect();
                    let depth = scope.len();
                    scope.extend(l.params.iter().map(String::as_str).zip(bound));
                    let r = self.static_site(&l.body, scope);
                    scope.truncate(depth);
                    r
                }
                _ => None,
            },
            Expr::Begin(es) => es.last().and_then(|last| self.static_site(last, scope)),
            _ => None,
        }
    }

    fn label_site(&mut self, form: &str, whole: &'a Expr, label: &'a Expr, scope: &mut Scope<'a>) -> Result<(), OracleError> {
        let site = self.static_site(label, scope).ok_or_else(|| OracleError::NotOracleSafe {
            reason: format!("{form} label is not a statically known let-label binder"),
            expr: whole.to_string(),
        })?;
        self.out.label_sites.insert(whole as *const Expr, site);
        self.out.referenced.insert(site, String::new());
        Ok(())
    }

    fn walk(&mut self, e: &'a Expr, scope: &mut Scope<'a>) -> Result<(), OracleError> {
        match e {
            Expr::FacetCreate { label, .. } => self.label_site("facet", e, label, scope)?,
            Expr::Obs { label, .. } => self.label_site("obs", e, label, scope)?,
            Expr::LetLabel { name, policy, body, site } => {
                self.out.sites.insert(*site, name.clone());
                self.walk(policy, scope)?;
                scope.push((name, Some(*site)));
                self.walk(body, scope)?;
                scope.pop();
                return Ok(());
            }
            Expr::Lambda(l) => {
                let depth = scope.len();
                scope.extend(l.params.iter().map(|p| (p.as_str(), None)));
                self.walk(&l.body, scope)?;
                scope.truncate(depth);
                return Ok(());
            }
            Expr::Apply(f, args) => {
                if let Expr::Lambda(l) = &**f {
                    if l.params.len() == args.len() {
                        for a in args {
                            self.walk(a, scope)?;
                        }
                        let bound: Vec<_> = args.iter().map(|a| self.static_site(a, scope)).collect();
                        let depth = scope.len();
                        scope.extend(l.params.iter().map(String::as_str).zip(bound));
                        self.walk(&l.body, scope)?;
                        scope.truncate(depth);
                        return Ok(());
                    }
                }
            }
            _ => {}
        }
        let mut children = Vec::new();
        e.for_each_child(|c| children.push(c));
        children.into_iter().try_for_each(|c| self.walk(c, scope))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reader::parse_program;

    #[test]
    fn resolves_through_defines_and_lets() {
        let p = parse_program(
            "(define a (let-label l (lambda (x) true) l))
             (let ([b a]) (facet b 1 0))
             (let-label m (lambda (x) true) (obs m 1 (facet a 2 3)))",
        )
        .unwrap();
        let r = resolve(&p).unwrap();
        assert_eq!(r.label_sites.len(), 3);
        let names: Vec<_> = r.referenced.values().cloned().collect();
        assert_eq!(names, ["l", "m"]);
    }

    #[test]
    fn rejects_dynamic_labels() {
        let p = parse_program("(define (f l) (facet l 1 0))").unwrap();
        assert!(matches!(resolve(&p), Err(OracleError::NotOracleSafe { .. })));
        let p = parse_program("(define a (let-label l (lambda (x) true) l)) (let ([a 5]) (facet a 1 0))").unwrap();
        assert!(resolve(&p).is_err());
    }
}
