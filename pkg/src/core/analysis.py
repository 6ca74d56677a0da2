"""
CurvatureAnalyzer: runs the full pipeline on one instance
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..utils.logger import get_logger
from .classifier import CheckResult, ClassReport, Side, Skipped, check_con_ae, check_reconstruction, classify
from .errors import DegeneratePlane, IsotropicDirection, NotEinstein
from .instances import InstanceSpec, LieFamilyPayload
from .lie_groups import FamilyOracle, LieGeometry, family_oracle, lie_geometry, nabla_q_invariant_tensor
from .metric_jets import (
    CirculantJet,
    CurvatureBundle,
    associated_jet,
    circulant_to_jet,
    compatibility_residual,
    curvature_bundle,
    nabla_q,
)
from .q_geometry import (
    DEGENERATE_COS,
    QBasisData,
    find_orthonormal_q_basis,
    is_isotropic,
    isotropic_ricci_value,
    limit_ricci,
    limit_ricci_numeric,
    limit_sectional,
    limit_sectional_numeric,
    phi_grid,
    plane_degeneracy,
    plane_nondegenerate,
    q_basis_data,
    q_plane_curvature_closed_form,
    q_plane_curvatures,
    ricci_curvature,
    ricci_curvature_closed_form,
    vector_with_angle,
)
from .tensor3 import (
    ArithmeticMode,
    Check,
    Scalar,
    Tolerance,
    Verdict,
    as_array,
    combine,
    compare,
    max_abs,
    q_orbit,
    quadratic,
    to_float,
)


# Theorem table: key and the identity it checks; every report carries all of them
THEOREM_STATEMENTS = {
    "ricci_relation": "rho~ = rho + (tau~* - tau)/3 g + (2 tau~ - 2 tau* + tau~* - tau)/6 g~",
    "reconstruction_g": "R is determined by rho and tau on g",
    "reconstruction_gt": "R~ is determined by rho~ and tau~ on g~",
    "l2_model": "in L2, R~ is the model tensor built from g, g~, tau~ and tau~*",
    "l1_scalar_relation": "an L2 associated metric is in L1 exactly when tau~* = -tau~",
    "plane_degeneracy": "{x, Qx} is degenerate under g~ exactly when cos phi = -1/3",
    "q_plane_curvature": "Q-plane sectional curvatures follow the closed form in tau~, tau~* and cos phi",
    "ricci_curvature": "Ricci curvatures along x, Qx, Q^2x follow the closed form in tau~, tau~* and cos phi",
    "connection": "both Levi-Civita connections are torsion-free and compatible with their metrics",
    "family_closed_form": "curvature of a Lie family matches its closed form",
}
THEOREM_KEYS = tuple(THEOREM_STATEMENTS)

_PLANES = ("x,Qx", "x,Q2x", "Qx,Q2x")
_ORBIT = ("x", "Qx", "Q2x")


@dataclass
class InstanceGeometry:
    """Both metrics of an instance with their curvature and class reports"""

    kind: str
    mode: ArithmeticMode
    g: np.ndarray
    gt: np.ndarray
    bundle_g: CurvatureBundle
    bundle_gt: CurvatureBundle
    class_g: ClassReport
    class_gt: ClassReport
    connection: Check
    nabla_g: np.ndarray
    nabla_gt: np.ndarray
    jet: Optional[CirculantJet] = None
    lie: Optional[LieGeometry] = None
    oracle: Optional[FamilyOracle] = None

    @property
    def einstein(self) -> bool:
        return isinstance(self.class_gt.einstein, Check) and self.class_gt.einstein.holds


@dataclass
class AnalysisReport:
    """Everything the analyze command reports for one instance"""

    instance: Dict[str, Any]
    arithmetic: str
    metrics: Dict[str, np.ndarray]
    curvature: Dict[str, dict]
    classes: Dict[str, dict]
    nabla_q: Dict[str, Scalar]
    q_geometry: Dict[str, Any]
    theorems: Dict[str, CheckResult] = field(default_factory=dict)
    oracle: Optional[FamilyOracle] = None

    @property
    def passed(self) -> bool:
        return all(check.holds for check in self.theorems.values())

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "arithmetic": self.arithmetic,
            "metrics": self.metrics,
            "curvature": self.curvature,
            "classes": self.classes,
            "nabla_q": self.nabla_q,
            "q_geometry": self.q_geometry,
            "theorems": {
                name: {**check.to_dict(), "statement": THEOREM_STATEMENTS[name]}
                for name, check in self.theorems.items()
            },
            "oracle": self.oracle.to_dict() if self.oracle else None,
        }


class CurvatureAnalyzer:
    """
    Coordinates the curvature engines for the analyze and sectional commands
    """

    def __init__(self, config):
        """Initialize the analyzer from a VerifierConfig"""
        self.config = config
        self.tolerance: Tolerance = config.tolerance()
        self.logger = get_logger("CurvatureAnalyzer")

    # ------------------------------------------------------------------
    # Geometry of an instance
    # ------------------------------------------------------------------

    def geometry(self, spec: InstanceSpec) -> InstanceGeometry:
        """
        Build both metrics, their curvature and class reports

        Raises:
            PositivityViolation: circulant jet without A > B > 0
            DegenerateAssociated: associated metric is singular
            NotALieAlgebra: custom brackets violate the Jacobi identity
        """
        obj = spec.build()
        if isinstance(obj, CirculantJet):
            return self._jet_geometry(spec, obj)
        return self._lie_geometry(spec, obj)

    def _jet_geometry(self, spec: InstanceSpec, cj: CirculantJet) -> InstanceGeometry:
        tol = self.tolerance
        g_jet = circulant_to_jet(cj, tol)
        gt_jet = associated_jet(cj, tol)
        bundle_g = curvature_bundle(g_jet, gt_jet.g_inv)
        bundle_gt = curvature_bundle(gt_jet, g_jet.g_inv)
        self.logger.debug(f"Jet curvature: tau={bundle_g.tau}, tau~={bundle_gt.tau}")
        connection = combine([
            compatibility_residual(g_jet, bundle_g.gamma, tol),
            compatibility_residual(gt_jet, bundle_gt.gamma, tol),
        ])
        nabla_g, nabla_gt = nabla_q(g_jet), nabla_q(gt_jet)
        return InstanceGeometry(
            kind=spec.kind,
            mode=spec.mode,
            g=g_jet.g,
            gt=gt_jet.g,
            bundle_g=bundle_g,
            bundle_gt=bundle_gt,
            class_g=self._classify(bundle_g, g_jet.g, gt_jet.g, Side.G, nabla_g, cj),
            class_gt=self._classify(bundle_gt, g_jet.g, gt_jet.g, Side.GT, nabla_gt, cj),
            connection=connection,
            nabla_g=nabla_g,
            nabla_gt=nabla_gt,
            jet=cj,
        )

    def _lie_geometry(self, spec: InstanceSpec, alg) -> InstanceGeometry:
        tol = self.tolerance
        lie = lie_geometry(alg, tol)
        oracle = None
        if isinstance(spec.payload, LieFamilyPayload):
            oracle = family_oracle(spec.payload.params(), spec.mode)
        nabla_g = nabla_q_invariant_tensor(lie.connection_g)
        nabla_gt = nabla_q_invariant_tensor(lie.connection_gt)
        return InstanceGeometry(
            kind=spec.kind,
            mode=spec.mode,
            g=lie.g,
            gt=lie.gt,
            bundle_g=lie.bundle_g,
            bundle_gt=lie.bundle_gt,
            class_g=self._classify(lie.bundle_g, lie.g, lie.gt, Side.G, nabla_g),
            class_gt=self._classify(lie.bundle_gt, lie.g, lie.gt, Side.GT, nabla_gt),
            connection=combine(lie.checks.values()),
            nabla_g=nabla_g,
            nabla_gt=nabla_gt,
            lie=lie,
            oracle=oracle,
        )

    def _classify(self, bundle, g, gt, side, nabla, cj=None) -> ClassReport:
        return classify(
            bundle, g, gt,
            side=side,
            nabla=nabla,
            cj=cj,
            samples=self.config.quantified_samples,
            seed=self.config.seed,
            tolerance=self.tolerance,
        )

    # ------------------------------------------------------------------
    # analyze
    # ------------------------------------------------------------------

    def analyze(self, spec: InstanceSpec) -> AnalysisReport:
        """
        Full pipeline for one instance

        Args:
            spec: Validated instance

        Returns:
            AnalysisReport with every theorem key present
        """
        self.logger.info(f"Analyzing {spec.kind} instance in {spec.arithmetic} mode")
        geo = self.geometry(spec)
        tol = self.tolerance

        table = self.q_geometry_table(geo)
        theorems: Dict[str, CheckResult] = {
            "ricci_relation": check_con_ae(geo.bundle_g, geo.bundle_gt, geo.g, geo.gt, tol),
            "reconstruction_g": check_reconstruction(geo.bundle_g, tol),
            "reconstruction_gt": check_reconstruction(geo.bundle_gt, tol),
            "l2_model": geo.class_gt.residuals["l2_model"],
            "l1_scalar_relation": self._l1_equivalence(geo.class_gt),
            "plane_degeneracy": table.pop("plane_degeneracy_check"),
            "q_plane_curvature": table.pop("q_plane_curvature_check"),
            "ricci_curvature": table.pop("ricci_curvature_check"),
            "connection": geo.connection,
            "family_closed_form": self._oracle_check(geo),
        }

        for name, check in theorems.items():
            if isinstance(check, Check) and not check.holds:
                self.logger.warning(f"{name}: {check.verdict.value} (residual {check.residual})")

        return AnalysisReport(
            instance=spec.to_dict(),
            arithmetic=spec.arithmetic,
            metrics={"g": geo.g, "gt": geo.gt},
            curvature={"g": geo.bundle_g.summary(), "gt": geo.bundle_gt.summary()},
            classes={"g": geo.class_g.to_dict(), "gt": geo.class_gt.to_dict()},
            nabla_q={"g": max_abs(geo.nabla_g), "gt": max_abs(geo.nabla_gt)},
            q_geometry=table,
            theorems=theorems,
            oracle=geo.oracle,
        )

    def _l1_equivalence(self, report: ClassReport) -> CheckResult:
        """tau~* = -tau~ holds exactly when the associated metric is in L1"""
        relation = report.residuals["l1_scalar_relation"]
        if isinstance(relation, Skipped):
            return relation
        if relation.verdict is report.l1.verdict:
            return Check(Verdict.HOLDS, 0.0)
        return Check(Verdict.FAILS, relation.residual, relation.scale)

    def _oracle_check(self, geo: InstanceGeometry) -> CheckResult:
        if geo.oracle is None:
            return Skipped("not a Lie family instance")
        tol = self.tolerance
        b = geo.bundle_gt
        return combine([
            compare(b.riemann, geo.oracle.riemann, tol),
            compare(b.ricci, geo.oracle.ricci, tol),
            compare([b.tau, b.tau_star], [geo.oracle.tau, geo.oracle.tau_star], tol),
        ])

    # ------------------------------------------------------------------
    # Q-geometry table
    # ------------------------------------------------------------------

    def q_geometry_table(self, geo: InstanceGeometry) -> Dict[str, Any]:
        """
        Sectional and Ricci curvatures over the phi-grid, isotropy and limits

        Always evaluated in float arithmetic; the private *_check entries
        are moved into the theorem table by analyze.
        """
        tol = self.tolerance
        g, gt = geo.g.astype(float), geo.gt.astype(float)
        R, rho = geo.bundle_gt.riemann.astype(float), geo.bundle_gt.ricci.astype(float)
        tau_t, tau_star_t = to_float(geo.bundle_gt.tau), to_float(geo.bundle_gt.tau_star)
        l2 = geo.class_gt.l2.holds

        rows: List[Dict[str, Any]] = []
        sectional_checks: List[Check] = []
        ricci_checks: List[Check] = []
        nondegenerate: List[Check] = []

        for phi in phi_grid(self.config.phi_grid_points):
            qb = q_basis_data(vector_with_angle(g, float(np.cos(phi)), tol), g, tol)
            row = self._grid_row(qb, R, rho, gt, tau_t, tau_star_t, l2)
            nondegenerate.append(row.pop("nondegenerate_check"))
            if l2:
                sectional_checks.extend(compare(k, row["k_closed_form"], tol) for k in row["k_direct"])
                ricci_checks.extend(compare(r, row["r_closed_form"], tol) for r in row["r_direct"])
            rows.append(row)

        # orthonormal Q-basis: phi = pi/2, every orbit vector isotropic
        e = find_orthonormal_q_basis(g, tol)
        qb_e = q_basis_data(e, g, tol)
        flags = [is_isotropic(v, gt, tol) for v in q_orbit(e)]
        isotropy: Dict[str, Any] = {
            "vector": e,
            "isotropic": {name: flag.holds for name, flag in zip(_ORBIT, flags)},
            "ricci_value": Skipped("associated metric not in L2"),
        }
        if l2:
            k_e = q_plane_curvatures(R, gt, qb_e, tol)
            sectional_checks.extend(compare(k, q_plane_curvature_closed_form(tau_t, tau_star_t, 0.0), tol) for k in k_e)
            isotropy["ricci_value"] = compare(quadratic(rho, e), isotropic_ricci_value(tau_star_t, qb_e.norm_g), tol)

        degenerate = q_basis_data(vector_with_angle(g, float(DEGENERATE_COS), tol), g, tol)
        lemma = combine([plane_degeneracy(degenerate, tol)] + nondegenerate)

        skipped_l2 = Skipped("associated metric not in L2")
        return {
            "phi_grid": rows,
            "isotropy": isotropy,
            "limits": self._limits(geo, R, rho, g, gt, tau_t, tau_star_t),
            "plane_degeneracy_check": lemma,
            "q_plane_curvature_check": combine(sectional_checks) if l2 else skipped_l2,
            "ricci_curvature_check": combine(ricci_checks) if l2 else skipped_l2,
        }

    def _grid_row(self, qb: QBasisData, R, rho, gt, tau_t, tau_star_t, l2: bool) -> Dict[str, Any]:
        tol = self.tolerance
        row: Dict[str, Any] = {
            "phi": qb.phi,
            "cos_phi": qb.cos_phi,
            "nondegenerate_check": plane_nondegenerate(qb, tol),
            "k_direct": list(q_plane_curvatures(R, gt, qb, tol)),
            "k_closed_form": None,
            "r_direct": [ricci_curvature(rho, gt, v, tol) for v in (qb.x, qb.qx, qb.q2x)],
            "r_closed_form": None,
        }
        if l2:
            row["k_closed_form"] = q_plane_curvature_closed_form(tau_t, tau_star_t, qb.cos_phi)
            row["r_closed_form"] = ricci_curvature_closed_form(tau_t, tau_star_t, qb.cos_phi)
        return row

    def _limits(self, geo: InstanceGeometry, R, rho, g, gt, tau_t, tau_star_t) -> Dict[str, Any]:
        if not geo.einstein:
            reason = Skipped("associated metric is not Einstein")
            return {"sectional": reason.to_dict(), "ricci": reason.to_dict()}
        offsets = self.config.limit_offsets
        convergence = self.config.limit_convergence
        try:
            sectional = limit_sectional_numeric(R, g, gt, tau_t, tau_star_t, offsets, convergence, self.tolerance)
            ricci = limit_ricci_numeric(rho, g, gt, tau_t, tau_star_t, offsets, convergence, self.tolerance)
        except NotEinstein as exc:
            self.logger.warning(f"Limits skipped: {exc}")
            reason = Skipped(str(exc))
            return {"sectional": reason.to_dict(), "ricci": reason.to_dict()}
        return {"sectional": sectional.to_dict(), "ricci": ricci.to_dict()}

    # ------------------------------------------------------------------
    # sectional
    # ------------------------------------------------------------------

    def sectional(self, spec: InstanceSpec, vector: Sequence) -> Dict[str, Any]:
        """
        Q-plane data of one vector

        Degenerate planes and isotropic directions are reported through
        their limit values when the associated metric is Einstein.

        Args:
            spec: Validated instance
            vector: Three components, numbers or rational strings

        Raises:
            NotAQBasis: vector does not induce a Q-basis
            DegeneratePlane: degenerate plane on a non-Einstein instance
            IsotropicDirection: isotropic vector on a non-Einstein instance
        """
        geo = self.geometry(spec)
        tol = self.tolerance
        b = geo.bundle_gt
        x = as_array(list(vector), spec.mode)
        qb = q_basis_data(x, geo.g, tol)
        nondegenerate = plane_nondegenerate(qb, tol)
        l2 = geo.class_gt.l2.holds
        self.logger.info(f"Q-basis of {list(x)}: cos phi = {qb.cos_phi}")

        planes: List[Dict[str, Any]] = []
        limits: Dict[str, Any] = {}
        if nondegenerate.verdict is Verdict.HOLDS:
            k_direct = q_plane_curvatures(b.riemann, geo.gt, qb, tol)
            k_closed = q_plane_curvature_closed_form(b.tau, b.tau_star, qb.cos_phi) if l2 else None
            planes = [
                {"plane": name, "k_direct": k, "k_closed_form": k_closed, "via": "direct"}
                for name, k in zip(_PLANES, k_direct)
            ]
        else:
            value = self._degenerate_value(geo)
            planes = [{"plane": name, "k_direct": None, "k_closed_form": value, "via": "limit"} for name in _PLANES]
            limits["sectional"] = limit_sectional_numeric(
                b.riemann, geo.g, geo.gt, to_float(b.tau), to_float(b.tau_star),
                self.config.limit_offsets, self.config.limit_convergence, tol,
            ).to_dict()

        ricci: List[Dict[str, Any]] = []
        for name, v in zip(_ORBIT, (qb.x, qb.qx, qb.q2x)):
            isotropic = is_isotropic(v, geo.gt, tol)
            entry: Dict[str, Any] = {"vector": name, "isotropic": isotropic.verdict is not Verdict.FAILS}
            if entry["isotropic"]:
                entry.update(r_direct=None, r_closed_form=self._isotropic_value(geo), via="limit")
                if "ricci" not in limits:
                    limits["ricci"] = limit_ricci_numeric(
                        b.ricci, geo.g, geo.gt, to_float(b.tau), to_float(b.tau_star),
                        self.config.limit_offsets, self.config.limit_convergence, tol,
                    ).to_dict()
            else:
                entry.update(
                    r_direct=ricci_curvature(b.ricci, geo.gt, v, tol),
                    r_closed_form=ricci_curvature_closed_form(b.tau, b.tau_star, qb.cos_phi) if l2 else None,
                    via="direct",
                )
            ricci.append(entry)

        return {
            "instance": spec.to_dict(),
            "vector": x,
            "cos_phi": qb.cos_phi,
            "phi": qb.phi,
            "nondegenerate": nondegenerate,
            "l2": l2,
            "einstein": geo.einstein,
            "planes": planes,
            "ricci": ricci,
            "limits": limits,
        }

    def _degenerate_value(self, geo: InstanceGeometry) -> Scalar:
        if not geo.einstein:
            raise DegeneratePlane("Q-plane is degenerate and the associated metric is not Einstein")
        try:
            return limit_sectional(geo.bundle_gt.tau, geo.bundle_gt.tau_star, self.tolerance)
        except NotEinstein as exc:
            raise DegeneratePlane(str(exc)) from exc

    def _isotropic_value(self, geo: InstanceGeometry) -> Scalar:
        if not geo.einstein:
            raise IsotropicDirection("Direction is isotropic and the associated metric is not Einstein")
        try:
            return limit_ricci(geo.bundle_gt.tau, geo.bundle_gt.tau_star, self.tolerance)
        except NotEinstein as exc:
            raise IsotropicDirection(str(exc)) from exc
