//! Laurent expansion at kappa = 0.

use super::{ArithError, MPoly, RatFn, Var};

/// `f = sum_{j=1}^{max_pole} poles[max_pole - j] * kappa^{-j} + regular`.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaLaurent {
    pub max_pole: u32,
    /// Coefficients of kappa^{-max_pole}, ..., kappa^{-1}.
    pub poles: Vec<RatFn>,
    /// The remainder, regular at kappa = 0.
    pub regular: RatFn,
}

impl KappaLaurent {
    /// Coefficient of kappa^{-j}, `1 <= j <= max_pole`.
    pub fn pole(&self, j: u32) -> &RatFn {
        &self.poles[(self.max_pole - j) as usize]
    }

    /// Reassembles the function.
    pub fn reassemble(&self) -> RatFn {
        let kappa = RatFn::var(Var::KAPPA);
        let mut acc = self.regular.clone();
        for j in 1..=self.max_pole {
            let c = self.pole(j);
            if !c.is_zero() {
                let t = c.div(&kappa.pow(j)).expect("kappa is nonzero");
                acc = acc.add(&t);
            }
        }
        acc
    }
}

/// Laurent coefficients of `f` at kappa = 0 down to kappa^{-max_pole}.
pub fn laurent_at_kappa(f: &RatFn, max_pole: u32) -> Result<KappaLaurent, ArithError> {
    let order = f.pole_order(Var::KAPPA);
    if order > max_pole {
        return Err(ArithError::ExcessPole {
            order,
            max: max_pole,
        });
    }
    let mut poles = vec![RatFn::zero(); max_pole as usize];
    if order == 0 {
        return Ok(KappaLaurent {
            max_pole,
            poles,
            regular: f.clone(),
        });
    }
    // g = kappa^order * f is regular; its Taylor coefficients g_0..g_{order-1}
    // are the pole coefficients kappa^{-order}..kappa^{-1}
    let g = f.mul_var_pow(Var::KAPPA, order);
    let zero = MPoly::zero();
    let kappa = RatFn::var(Var::KAPPA);
    let mut deriv = g.clone();
    let mut factorial = RatFn::one();
    let mut rest = f.clone();
    for i in 0..order {
        if i > 0 {
            deriv = deriv.derivative(Var::KAPPA);
            factorial = factorial.mul(&RatFn::from_int(i as i64));
        }
        let gi = deriv
            .substitute(Var::KAPPA, &zero)?
            .div(&factorial)
            .expect("factorial is nonzero");
        let j = order - i;
        if !gi.is_zero() {
            rest = rest.sub(&gi.div(&kappa.pow(j)).expect("kappa is nonzero"));
        }
        poles[(max_pole - j) as usize] = gi;
    }
    debug_assert_eq!(rest.pole_order(Var::KAPPA), 0);
    Ok(KappaLaurent {
        max_pole,
        poles,
        regular: rest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> RatFn {
        RatFn::var(Var::a(1))
    }
    fn k() -> RatFn {
        RatFn::var(Var::KAPPA)
    }

    #[test]
    fn linear_pole_residue() {
        // f = c/(-2 kappa) + a/(a + kappa)
        let c = a().add(&RatFn::from_int(3));
        let f = c
            .div(&k().scale_rat(&crate::arith::rat(-2, 1)))
            .unwrap()
            .add(&a().div(&a().add(&k())).unwrap());
        let l = laurent_at_kappa(&f, 1).unwrap();
        assert_eq!(l.pole(1), &c.scale_rat(&crate::arith::rat(-1, 2)));
        assert_eq!(l.regular, a().div(&a().add(&k())).unwrap());
        assert_eq!(l.reassemble(), f);
    }

    #[test]
    fn regular_function_has_zero_residue() {
        let f = a().div(&a().add(&k())).unwrap();
        let l = laurent_at_kappa(&f, 1).unwrap();
        assert!(l.pole(1).is_zero());
        assert_eq!(l.regular, f);
    }

    #[test]
    fn excess_pole_is_reported() {
        let f = RatFn::one().div(&k().pow(2)).unwrap();
        assert_eq!(
            laurent_at_kappa(&f, 1),
            Err(ArithError::ExcessPole { order: 2, max: 1 })
        );
    }

    #[test]
    fn double_pole_expansion() {
        // 1/(kappa^2 (1 + kappa)) = kappa^-2 - kappa^-1 + 1/(1+kappa)
        let f = RatFn::one()
            .div(&k().pow(2).mul(&RatFn::one().add(&k())))
            .unwrap();
        let l = laurent_at_kappa(&f, 2).unwrap();
        assert_eq!(l.pole(2), &RatFn::one());
        assert_eq!(l.pole(1), &RatFn::from_int(-1));
        assert_eq!(l.regular, RatFn::one().div(&RatFn::one().add(&k())).unwrap());
    }
}
