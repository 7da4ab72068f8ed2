"""
실험 실행 서비스 (fig2, fig3, ghz, kicks, sweep)
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import scipy.linalg as la

from config.settings import get_settings
from core.connector import xi_phase
from core.digital import GoldenSectionMatcher, KickFamily, KickSchedule, run_kicks
from core.hamiltonians import (
    build_oat,
    build_xxx_staggered,
    effective_twisting_rate,
    frame_frequency,
    matched_params,
    second_order_parity_constant,
)
from core.observables import (
    SX_LABEL,
    SY_LABEL,
    fidelity,
    ghz_fidelity,
    oat_ghz_axis,
    oat_sx_analytic,
    reconstruct_sx,
    rotating_frame,
)
from core.spin_algebra import HilbertSpace, Operator, StateVector, coherent_x_state, collective_spin, op_combine
from models.experiment_models import (
    ExperimentConfig,
    ExperimentKind,
    Frame,
    KickInitialState,
    KickMatcherMode,
    ParityConstantMode,
    RatioSpacing,
    SweepAxis,
)
from models.report_models import HeatmapGrid, KickReport, ReconstructionRecord
from models.spin_models import HamiltonianKind, HamiltonianSpec, SpinChainParams
from providers.propagator import PropagatorBackend, PropagatorFactory, trajectory
from services.output_service import OutputService

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_GHZ_SITES = [2, 3, 4, 5, 6]
DEFAULT_SWEEP_VALUES = {
    SweepAxis.RATIO: [5.0, 10.0, 20.0, 40.0],
    SweepAxis.N_SITES: [4.0, 5.0, 6.0],
    SweepAxis.CHI: [0.5, 1.0, 2.0],
    SweepAxis.TIME_MAX: [math.pi / 4, math.pi / 2, math.pi],
}


@dataclass
class ExperimentResult:
    experiment: ExperimentKind
    files: List[str] = field(default_factory=list)
    metrics: Dict[str, float] = field(default_factory=dict)


class ExperimentService:
    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.settings = get_settings()
        self.output = OutputService(config.output_dir)
        self.backend = PropagatorBackend(config.backend) if config.backend else None
        self._runners: Dict[ExperimentKind, Callable[[], ExperimentResult]] = {
            ExperimentKind.FIG2: self.run_fig2,
            ExperimentKind.FIG3: self.run_fig3,
            ExperimentKind.GHZ: self.run_ghz,
            ExperimentKind.KICKS: self.run_kicks,
            ExperimentKind.SWEEP: self.run_sweep,
        }

    def run(self) -> ExperimentResult:
        experiment = self.config.experiment
        logger.info(f"실험 시작: {experiment.value} (threads={self.config.threads}, out={self.config.output_dir})")
        start = time.time()
        result = self._runners[experiment]()
        logger.info(f"실험 완료: {experiment.value} ({time.time() - start:.2f}s) 지표={result.metrics}")
        return result

    # -------------------------------------------------------------------
    # 공통
    # -------------------------------------------------------------------

    def _odd_constant(self, config: ExperimentConfig, n_sites: int) -> Optional[float]:
        mode = config.parity_constant or ParityConstantMode.SECOND_ORDER
        if mode == ParityConstantMode.FIXED:
            return None
        return second_order_parity_constant(n_sites)

    def _params(self, config: ExperimentConfig, n_sites: int, ratio: Optional[float] = None) -> SpinChainParams:
        fields = {}
        if config.ferromagnetic is not None:
            fields["ferromagnetic"] = config.ferromagnetic
        if config.alpha is not None:
            return SpinChainParams(n_sites=n_sites, chi=config.chi, alpha=config.alpha, beta=config.beta, **fields)
        ratio = config.ratio if ratio is None else ratio
        return matched_params(n_sites, config.chi, ratio, self._odd_constant(config, n_sites),
                              ferromagnetic=config.ferromagnetic)

    @staticmethod
    def _time_grid(config: ExperimentConfig) -> np.ndarray:
        """chi*t 격자"""
        return np.linspace(0.0, config.time_max, config.time_samples)

    def _map(self, func: Callable[..., T], items: Sequence) -> List[T]:
        """격자점 병렬 평가, 결과는 입력 순서"""
        if self.config.threads <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.threads) as executor:
            return list(executor.map(func, items))

    def _simulator_states(self, params: SpinChainParams, psi0: StateVector, times_phys: np.ndarray,
                          frame: Frame) -> List[StateVector]:
        h_qs = build_xxx_staggered(params)
        states = PropagatorFactory.create(h_qs, self.backend).evolve_many(psi0, times_phys)
        if frame == Frame.ROTATING:
            omega = frame_frequency(params)
            states = [rotating_frame(state, t, omega) for state, t in zip(states, times_phys)]
        return states

    # -------------------------------------------------------------------
    # fig2: <S_x>_T 재구성
    # -------------------------------------------------------------------

    def reconstruction(self, config: ExperimentConfig, n_sites: int) -> ReconstructionRecord:
        params = self._params(config, n_sites)
        space = HilbertSpace(n_sites)
        psi0 = coherent_x_state(space)
        times_phys = self._time_grid(config) / config.chi
        sx = collective_spin("x", space)
        sy = collective_spin("y", space)

        prop_qs = PropagatorFactory.create(build_xxx_staggered(params), self.backend)
        prop_t = PropagatorFactory.create(build_oat(params), self.backend)
        traj_qs = trajectory(prop_qs, psi0, times_phys, [(SX_LABEL, sx), (SY_LABEL, sy)])
        direct = trajectory(prop_t, psi0, times_phys, [(SX_LABEL, sx)]).series(SX_LABEL)
        record = reconstruct_sx(traj_qs).with_direct(direct)
        return ReconstructionRecord(self._time_grid(config), record.sx_qs, record.sy_qs,
                                    record.sx_target_reconstructed, record.sx_target_direct)

    def run_fig2(self) -> ExperimentResult:
        config = self.config
        n = config.n_sites
        record = self.reconstruction(config, n)
        deviation = record.max_deviation()
        analytic_error = float(np.max(np.abs(record.sx_target_direct - oat_sx_analytic(n, record.times))))
        bound = 0.05 * n / 2.0
        logger.info(f"fig2 최대 재구성 편차 {deviation:.6g} (기준 {bound:.6g}), 해석해 오차 {analytic_error:.3g}")
        if deviation > bound:
            logger.warning(f"재구성 편차 {deviation:.6g} 가 기준 {bound:.6g} 를 넘습니다")

        rows = zip(record.times, record.sx_qs, record.sy_qs, record.sx_target_reconstructed, record.sx_target_direct)
        csv_path = self.output.write_csv("fig2.csv", config.resolved_line(),
                                         ["t", "sx_qs", "sy_qs", "sx_reconstructed", "sx_direct"], rows)
        svg_path = self.output.render_curves("fig2.csv", "fig2.svg")
        return ExperimentResult(ExperimentKind.FIG2, [str(csv_path), str(svg_path)], {
            "max_deviation": deviation,
            "deviation_bound": bound,
            "analytic_error": analytic_error,
        })

    # -------------------------------------------------------------------
    # fig3: fidelity heatmap
    # -------------------------------------------------------------------

    @staticmethod
    def ratio_grid(config: ExperimentConfig) -> np.ndarray:
        if config.ratio_spacing == RatioSpacing.LOG:
            return np.geomspace(config.ratio_min, config.ratio_max, config.ratio_samples)
        return np.linspace(config.ratio_min, config.ratio_max, config.ratio_samples)

    def fidelity_heatmap(self, config: ExperimentConfig, n_sites: int, ratios: Sequence[float],
                         frame: Frame) -> HeatmapGrid:
        space = HilbertSpace(n_sites)
        psi0 = coherent_x_state(space)
        chi_t = self._time_grid(config)
        times_phys = chi_t / config.chi
        target_params = SpinChainParams(n_sites=n_sites, chi=config.chi)
        oat_states = PropagatorFactory.create(build_oat(target_params), self.backend).evolve_many(psi0, times_phys)

        def row(ratio: float) -> List[float]:
            params = self._params(config, n_sites, ratio)
            states = self._simulator_states(params, psi0, times_phys, frame)
            return [min(1.0, fidelity(a, b)) for a, b in zip(oat_states, states)]

        z = self._map(row, list(ratios))
        return HeatmapGrid(chi_t, np.asarray(ratios, dtype=float), np.array(z), label=f"N={n_sites} {frame.value}")

    def run_fig3(self) -> ExperimentResult:
        config = self.config
        ratios = self.ratio_grid(config)
        result = ExperimentResult(ExperimentKind.FIG3)

        for n in config.sites_list or [config.n_sites]:
            grid = self.fidelity_heatmap(config, n, ratios, config.frame)
            stem = f"fig3_N{n}_{config.frame.value}"
            csv_path = self.output.write_csv(f"{stem}.csv", config.resolved_line(),
                                             ["chi_t", "ratio", "fidelity"], grid.long_rows())
            svg_path = self.output.render_heatmap(f"{stem}.csv", f"{stem}.svg",
                                                  title=f"N = {n}, {config.frame.value} frame")
            result.files += [str(csv_path), str(svg_path)]
            result.metrics[f"N{n}_mean_fidelity"] = grid.mean()
            result.metrics[f"N{n}_ghz_time_fidelity_max_ratio"] = grid.value_at(config.ghz_time, ratios[-1])
        return result

    # -------------------------------------------------------------------
    # ghz
    # -------------------------------------------------------------------

    def ghz_fidelities(self, config: ExperimentConfig, n_sites: int) -> Tuple[float, float]:
        """(시뮬레이터 경로, 직접 OAT) GHZ fidelity"""
        space = HilbertSpace(n_sites)
        psi0 = coherent_x_state(space)
        t = config.ghz_time / config.chi
        axis = oat_ghz_axis(n_sites)

        target_params = SpinChainParams(n_sites=n_sites, chi=config.chi)
        direct = PropagatorFactory.create(build_oat(target_params), self.backend).evolve(psi0, t)
        # 홀수 N의 세차 운동은 회전 좌표계에서 제거
        params = self._params(config, n_sites)
        simulated = self._simulator_states(params, psi0, np.array([t]), Frame.ROTATING)[0]
        return ghz_fidelity(simulated, axis), ghz_fidelity(direct, axis)

    def run_ghz(self) -> ExperimentResult:
        config = self.config
        sites = config.sites_list or DEFAULT_GHZ_SITES
        values = self._map(lambda n: self.ghz_fidelities(config, n), sites)

        rows = [(n, config.ghz_time, sim, direct) for n, (sim, direct) in zip(sites, values)]
        for n in sites:
            logger.info(f"N={n}: GHZ 축 {oat_ghz_axis(n)}")
        csv_path = self.output.write_csv("ghz.csv", config.resolved_line(),
                                         ["n_sites", "chi_t", "ghz_simulator", "ghz_direct"], rows)
        metrics = {}
        for n, (sim, direct) in zip(sites, values):
            metrics[f"N{n}_simulator"] = sim
            metrics[f"N{n}_direct"] = direct
        return ExperimentResult(ExperimentKind.GHZ, [str(csv_path)], metrics)

    # -------------------------------------------------------------------
    # kicks
    # -------------------------------------------------------------------

    @staticmethod
    def connector_eigenstate(h_qs: Operator, h_t: Operator, reference: StateVector) -> StateVector:
        """h = H_qs - H_t 의 고유벡터 중 reference 와 겹침이 가장 큰 것"""
        h = op_combine([(1.0, h_qs), (-1.0, h_t)])
        _, vectors = la.eigh(h.to_dense())
        weights = np.abs(vectors.conj().T @ reference.amplitudes)
        best = int(np.argmax(weights))
        return StateVector.from_amplitudes(h.space, vectors[:, best])

    def kick_run(self, config: ExperimentConfig) -> Tuple[KickReport, StateVector]:
        n = config.n_sites
        params = self._params(config, n)
        kick_params = params.model_copy(update={"alpha": params.alpha * config.alpha_scale})
        target = build_oat(params)
        base = HamiltonianSpec(kind=HamiltonianKind.XXX_STAGGERED, params=kick_params)

        space = HilbertSpace(n)
        psi0 = coherent_x_state(space)
        if config.kick_state == KickInitialState.CONNECTOR_EIGENSTATE:
            psi0 = self.connector_eigenstate(build_xxx_staggered(params), target, psi0)

        total = config.time_max / config.chi
        if config.kick_matcher == KickMatcherMode.NONE:
            schedule = KickSchedule.uniform(base, target, total, config.n_kicks)
        else:
            family = KickFamily(base, "alpha")
            interval = (config.search_low * params.alpha, config.search_high * params.alpha)
            matcher = GoldenSectionMatcher(family, interval, objective=config.kick_matcher.value,
                                           backend=self.backend)
            schedule = KickSchedule.uniform(None, target, total, config.n_kicks, matcher=matcher)

        final_state, report = run_kicks(schedule, psi0, backend=self.backend)
        return report, final_state

    def run_kicks(self) -> ExperimentResult:
        config = self.config
        report, _ = self.kick_run(config)
        for record in report.records:
            if record.parameter is not None:
                logger.info(f"kick {record.index}: alpha = {record.parameter:.12g}")

        rows = [(r.index, r.duration, r.residual, r.commutator_norm, r.running_fidelity) for r in report.records]
        csv_path = self.output.write_csv("kicks.csv", config.resolved_line(),
                                         ["kick", "duration", "residual", "commutator_norm", "running_fidelity"],
                                         rows)
        return ExperimentResult(ExperimentKind.KICKS, [str(csv_path)], {
            "final_fidelity": report.final_fidelity,
            "step_count": float(report.step_count),
        })

    # -------------------------------------------------------------------
    # sweep
    # -------------------------------------------------------------------

    def sweep_point(self, config: ExperimentConfig, axis: SweepAxis, value: float) -> List[float]:
        update = {axis.value: int(value) if axis == SweepAxis.N_SITES else float(value)}
        point = ExperimentConfig(**{**config.model_dump(), **update})
        n = point.n_sites
        params = self._params(point, n)

        space = HilbertSpace(n)
        psi0 = coherent_x_state(space)
        chi_t = self._time_grid(point)
        times_phys = chi_t / point.chi
        h_qs = build_xxx_staggered(params)
        h_t = build_oat(params)

        simulated = self._simulator_states(params, psi0, times_phys[-1:], point.frame)[0]
        direct = PropagatorFactory.create(h_t, self.backend).evolve(psi0, times_phys[-1])
        report = xi_phase(h_qs, h_t, psi0, times_phys, backend=self.backend)
        record = self.reconstruction(point, n)

        return [
            value,
            params.alpha,
            params.beta,
            fidelity(direct, simulated),
            report.max_xi_imag,
            record.max_deviation(),
            effective_twisting_rate(params),
        ]

    def run_sweep(self) -> ExperimentResult:
        config = self.config
        axis = config.sweep_axis
        values = config.sweep_values or DEFAULT_SWEEP_VALUES[axis]
        rows = self._map(lambda v: self.sweep_point(config, axis, v), list(values))

        header = [axis.value, "alpha", "beta", "final_fidelity", "max_xi_imag",
                  "max_reconstruction_deviation", "effective_chi"]
        if axis == SweepAxis.N_SITES:
            rows = [[int(row[0])] + row[1:] for row in rows]
        csv_path = self.output.write_csv(f"sweep_{axis.value}.csv", config.resolved_line(), header, rows)
        metrics = {f"{axis.value}={row[0]}_final_fidelity": float(row[3]) for row in rows}
        return ExperimentResult(ExperimentKind.SWEEP, [str(csv_path)], metrics)
