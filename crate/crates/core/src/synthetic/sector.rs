//! Linear supply/demand model of a small sector exposed to monetary policy.
//!
//! Supply falls with the price of interest-sensitive domestic inputs, of
//! imported inputs and of other inputs, and rises with the output price.
//! Demand rises with national income and falls with the sector's relative
//! price; a weaker currency adds demand through competitiveness. A rate
//! cut therefore raises supply through cheaper capital, lowers it through
//! dearer imports, and raises demand through income and competitiveness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarketRegime {
    /// Price and quantity where supply meets demand.
    Competitive,
    /// Administered price; quantity read off the supply curve.
    PriceSupport { price: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorCalibration {
    // supply: q = intercept + price_slope p - capital P_z(r) - imported P_ze(e) - other P_a
    pub supply_intercept: f64,
    pub supply_price_slope: f64,
    pub capital_input_sensitivity: f64,
    pub imported_input_sensitivity: f64,
    pub other_input_sensitivity: f64,
    pub other_input_price: f64,

    // P_z(r) = base + slope r, P_ze(e) = base + slope e
    pub capital_price_base: f64,
    pub capital_price_rate_slope: f64,
    pub imported_price_base: f64,
    pub imported_price_fx_slope: f64,

    // demand: q = intercept + income Y + relative_price (p / P) + competitiveness e
    pub demand_intercept: f64,
    pub income_slope: f64,
    pub relative_price_slope: f64,
    pub competitiveness_slope: f64,
    pub price_level: f64,

    // macro linkage around the base point
    pub base_rate: f64,
    pub base_exchange_rate: f64,
    pub base_income: f64,
    /// dY/dr, negative.
    pub income_rate_slope: f64,
    /// de/dr, negative: a rate cut depreciates the currency.
    pub exchange_rate_slope: f64,

    pub regime: MarketRegime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub price: f64,
    pub quantity: f64,
    pub negative_quantity: bool,
}

impl SectorCalibration {
    pub fn capital_input_price(&self, rate: f64) -> f64 {
        self.capital_price_base + self.capital_price_rate_slope * rate
    }

    pub fn imported_input_price(&self, exchange_rate: f64) -> f64 {
        self.imported_price_base + self.imported_price_fx_slope * exchange_rate
    }

    pub fn supply_quantity(&self, price: f64, capital_price: f64, imported_price: f64, other_price: f64) -> f64 {
        self.supply_intercept + self.supply_price_slope * price
            - self.capital_input_sensitivity * capital_price
            - self.imported_input_sensitivity * imported_price
            - self.other_input_sensitivity * other_price
    }

    pub fn demand_quantity(&self, income: f64, relative_price: f64, exchange_rate: f64) -> f64 {
        self.demand_intercept
            + self.income_slope * income
            + self.relative_price_slope * relative_price
            + self.competitiveness_slope * exchange_rate
    }

    /// Income and exchange rate implied by `rate` through the macro linkage.
    pub fn macro_state(&self, rate: f64) -> (f64, f64) {
        let dr = rate - self.base_rate;
        (self.base_income + self.income_rate_slope * dr, self.base_exchange_rate + self.exchange_rate_slope * dr)
    }

    /// Supply level at a zero output price, given macro conditions.
    fn supply_shift(&self, rate: f64, exchange_rate: f64) -> f64 {
        self.supply_quantity(
            0.0,
            self.capital_input_price(rate),
            self.imported_input_price(exchange_rate),
            self.other_input_price,
        )
    }

    fn demand_shift(&self, income: f64, exchange_rate: f64) -> f64 {
        self.demand_quantity(income, 0.0, exchange_rate)
    }

    /// Slope of demand in the sector's own price.
    pub fn demand_price_slope(&self) -> f64 {
        self.relative_price_slope / self.price_level
    }

    /// Checks every sign restriction of the supply and demand functions.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.supply_price_slope > 0.0, "supply must rise with the output price"),
            (self.capital_input_sensitivity > 0.0, "supply must fall with the capital input price"),
            (self.imported_input_sensitivity > 0.0, "supply must fall with the imported input price"),
            (self.other_input_sensitivity > 0.0, "supply must fall with the other input price"),
            (self.capital_price_rate_slope > 0.0, "capital input price must rise with the rate"),
            (self.imported_price_fx_slope > 0.0, "imported input price must rise with the exchange rate"),
            (self.income_slope > 0.0, "demand must rise with income"),
            (self.relative_price_slope < 0.0, "demand must fall with the relative price"),
            (self.competitiveness_slope >= 0.0, "depreciation cannot reduce demand"),
            (self.price_level > 0.0, "price level must be positive"),
            (self.income_rate_slope <= 0.0, "income cannot rise with the rate"),
            (self.exchange_rate_slope <= 0.0, "a rate rise cannot depreciate the currency"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidInput(msg.into()));
            }
        }
        if let MarketRegime::PriceSupport { price } = self.regime {
            if !(price > 0.0) {
                return Err(Error::InvalidInput("support price must be positive".into()));
            }
        }
        Ok(())
    }

    /// A sector whose imported inputs are minor and capital inputs large.
    pub fn low_imported_input() -> Self {
        Self {
            supply_intercept: 40.0,
            supply_price_slope: 2.0,
            capital_input_sensitivity: 3.0,
            imported_input_sensitivity: 0.2,
            other_input_sensitivity: 1.0,
            other_input_price: 5.0,
            capital_price_base: 2.0,
            capital_price_rate_slope: 1.0,
            imported_price_base: 5.0,
            imported_price_fx_slope: 4.0,
            demand_intercept: 60.0,
            income_slope: 0.05,
            relative_price_slope: -2.0,
            competitiveness_slope: 1.0,
            price_level: 1.0,
            base_rate: 8.0,
            base_exchange_rate: 1.0,
            base_income: 100.0,
            income_rate_slope: -0.5,
            exchange_rate_slope: -0.02,
            regime: MarketRegime::Competitive,
        }
    }

    /// Heavy reliance on imported inputs and little capital.
    pub fn import_heavy() -> Self {
        Self {
            capital_input_sensitivity: 0.2,
            imported_input_sensitivity: 6.0,
            imported_price_fx_slope: 10.0,
            exchange_rate_slope: -0.05,
            income_slope: 0.01,
            competitiveness_slope: 0.1,
            ..Self::low_imported_input()
        }
    }

    /// Cost channel dominant: policy mainly moves supply via capital costs.
    pub fn cost_dominated() -> Self {
        Self { capital_input_sensitivity: 6.0, ..Self::low_imported_input() }
    }

    /// Administered output price.
    pub fn price_support() -> Self {
        Self { regime: MarketRegime::PriceSupport { price: 12.0 }, ..Self::low_imported_input() }
    }

    pub fn presets() -> Vec<(&'static str, Self)> {
        vec![
            ("low_imported_input", Self::low_imported_input()),
            ("import_heavy", Self::import_heavy()),
            ("cost_dominated", Self::cost_dominated()),
            ("price_support", Self::price_support()),
        ]
    }
}

/// Market outcome for given rate, exchange rate and income.
pub fn sector_equilibrium(cal: &SectorCalibration, rate: f64, exchange_rate: f64, income: f64) -> Result<Equilibrium> {
    let s0 = cal.supply_shift(rate, exchange_rate);
    let (price, quantity) = match cal.regime {
        MarketRegime::PriceSupport { price } => (price, s0 + cal.supply_price_slope * price),
        MarketRegime::Competitive => {
            let d0 = cal.demand_shift(income, exchange_rate);
            let slope_gap = cal.supply_price_slope - cal.demand_price_slope();
            if slope_gap == 0.0 || !slope_gap.is_finite() {
                return Err(Error::NoEquilibrium);
            }
            let price = (d0 - s0) / slope_gap;
            (price, s0 + cal.supply_price_slope * price)
        }
    };
    Ok(Equilibrium { price, quantity, negative_quantity: quantity < 0.0 })
}

/// Quantity change from a policy move, split by transmission channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEffects {
    /// Cheaper or dearer interest-sensitive inputs.
    pub cost: f64,
    pub imported_input: f64,
    pub income: f64,
    pub competitiveness: f64,
    /// Equilibrium quantity change, computed directly.
    pub total: f64,
    pub total_sign: i8,
}

impl ChannelEffects {
    pub fn channel_sum(&self) -> f64 {
        self.cost + self.imported_input + self.income + self.competitiveness
    }
}

/// Splits the quantity response to `(delta_rate, delta_exchange_rate)` at
/// the calibration's base point. Income moves with the rate through the
/// macro linkage; the exchange-rate change is taken as given.
pub fn shock_comparative_statics(
    cal: &SectorCalibration,
    delta_rate: f64,
    delta_exchange_rate: f64,
) -> Result<ChannelEffects> {
    let delta_income = cal.income_rate_slope * delta_rate;
    let s = cal.supply_price_slope;
    let d = cal.demand_price_slope();
    // pass-through of intercept shifts into equilibrium quantity
    let (supply_pass, demand_pass) = match cal.regime {
        MarketRegime::PriceSupport { .. } => (1.0, 0.0),
        MarketRegime::Competitive => {
            if s == d {
                return Err(Error::NoEquilibrium);
            }
            (-d / (s - d), s / (s - d))
        }
    };
    let cost = -cal.capital_input_sensitivity * cal.capital_price_rate_slope * delta_rate * supply_pass;
    let imported_input =
        -cal.imported_input_sensitivity * cal.imported_price_fx_slope * delta_exchange_rate * supply_pass;
    let income = cal.income_slope * delta_income * demand_pass;
    let competitiveness = cal.competitiveness_slope * delta_exchange_rate * demand_pass;

    let before = sector_equilibrium(cal, cal.base_rate, cal.base_exchange_rate, cal.base_income)?;
    let after = sector_equilibrium(
        cal,
        cal.base_rate + delta_rate,
        cal.base_exchange_rate + delta_exchange_rate,
        cal.base_income + delta_income,
    )?;
    let total = after.quantity - before.quantity;
    let total_sign = if total > 0.0 {
        1
    } else if total < 0.0 {
        -1
    } else {
        0
    };
    Ok(ChannelEffects { cost, imported_input, income, competitiveness, total, total_sign })
}

/// Channel split for a rate move with the exchange rate following the
/// macro linkage.
pub fn rate_shock_statics(cal: &SectorCalibration, delta_rate: f64) -> Result<ChannelEffects> {
    shock_comparative_statics(cal, delta_rate, cal.exchange_rate_slope * delta_rate)
}

/// Required sign of a partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCheck {
    pub derivative: &'static str,
    pub value: f64,
    pub expected: Sign,
    pub holds: bool,
}

/// Central finite differences of the supply, demand and pass-through
/// functions at the base equilibrium, each compared with its required sign.
pub fn sign_checks(cal: &SectorCalibration, step: f64) -> Result<Vec<SignCheck>> {
    let (y, e) = cal.macro_state(cal.base_rate);
    let eq = sector_equilibrium(cal, cal.base_rate, e, y)?;
    let (pz, pze, pa) = (cal.capital_input_price(cal.base_rate), cal.imported_input_price(e), cal.other_input_price);
    let rel = eq.price / cal.price_level;
    let diff = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + step) - f(x - step)) / (2.0 * step);

    let cases: [(&'static str, f64, Sign); 8] = [
        ("supply/output_price", diff(&|p| cal.supply_quantity(p, pz, pze, pa), eq.price), Sign::Positive),
        ("supply/capital_price", diff(&|z| cal.supply_quantity(eq.price, z, pze, pa), pz), Sign::Negative),
        ("supply/imported_price", diff(&|z| cal.supply_quantity(eq.price, pz, z, pa), pze), Sign::Negative),
        ("supply/other_price", diff(&|z| cal.supply_quantity(eq.price, pz, pze, z), pa), Sign::Negative),
        ("demand/income", diff(&|v| cal.demand_quantity(v, rel, e), y), Sign::Positive),
        ("demand/relative_price", diff(&|v| cal.demand_quantity(y, v, e), rel), Sign::Negative),
        ("capital_price/rate", diff(&|r| cal.capital_input_price(r), cal.base_rate), Sign::Positive),
        ("imported_price/exchange_rate", diff(&|x| cal.imported_input_price(x), e), Sign::Positive),
    ];
    Ok(cases
        .into_iter()
        .map(|(derivative, value, expected)| SignCheck {
            derivative,
            value,
            expected,
            holds: match expected {
                Sign::Positive => value > 0.0,
                Sign::Negative => value < 0.0,
            },
        })
        .collect())
}
