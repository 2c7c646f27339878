use super::structure::Structure;
use crate::error::{Error, Result};
use crate::syntax::{Binder, Context, Formula, Term};
use std::collections::BTreeSet;

/// Existential positive diagram of `(m, tuple)` in `ctx`: each tuple entry is
/// named by the context variable at its first occurrence, every other element
/// by an existentially bound variable, and all atoms of `m` are conjoined
/// together with the equalities forced by repeated entries.
///
/// For any pointed structure `(n, b)`, the query holds at `b` iff some
/// homomorphism `m -> n` sends `tuple` to `b`.
pub fn canonical_query(m: &Structure, tuple: &[usize], ctx: &Context) -> Result<Formula> {
    let sig = m.signature();
    let sorts = ctx.sort_ids(sig)?;
    if sorts.len() != tuple.len() || tuple.iter().zip(&sorts).any(|(&e, &s)| e >= m.size(s)) {
        return Err(Error::sort("tuple", "tuple does not match the context"));
    }
    let names: Vec<&str> = ctx.names().collect();
    let taken: BTreeSet<&str> = names.iter().copied().collect();
    let mut var: Vec<Vec<Option<String>>> = (0..sig.sorts.len()).map(|s| vec![None; m.size(s)]).collect();
    let mut eqs = Vec::new();
    for (i, (&e, &s)) in tuple.iter().zip(&sorts).enumerate() {
        match &var[s][e] {
            Some(first) => eqs.push(Formula::eq_vars(first, names[i])),
            None => var[s][e] = Some(names[i].to_string()),
        }
    }
    let mut binders = Vec::new();
    let mut k = 0;
    for (s, slots) in var.iter_mut().enumerate() {
        for slot in slots.iter_mut() {
            if slot.is_none() {
                let name = loop {
                    k += 1;
                    let n = format!("y{k}");
                    if !taken.contains(n.as_str()) {
                        break n;
                    }
                };
                binders.push(Binder::new(&name, sig.sort_name(s)));
                *slot = Some(name);
            }
        }
    }
    let mut conj = eqs;
    for (r, t) in m.atoms() {
        let sym = &sig.relations[r];
        let args = t
            .iter()
            .zip(&sym.arity)
            .map(|(&e, &s)| Term::Var(var[s][e].clone().unwrap()))
            .collect();
        conj.push(Formula::Rel(sym.name.clone(), args));
    }
    if conj.is_empty() && binders.is_empty() {
        if let Some(x) = names.first() {
            return Ok(Formula::eq_vars(x, x));
        }
        return Ok(Formula::True);
    }
    Ok(Formula::exists(binders, Formula::and(conj)))
}
