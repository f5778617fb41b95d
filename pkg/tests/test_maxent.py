import numpy as np
import pytest

from symmaxent import linalg, states
from symmaxent.linalg import HermitianOperator
from symmaxent.maxent import (
    MaxEntProblem,
    MaxEntSolution,
    SolverOptions,
    gradient,
    objective,
    rho_of_lambda,
    solve,
    susceptibility,
)
from symmaxent.observables import expectation, pauli_basis, sic_povm
from symmaxent.symmetry import build_symmetry

from conftest import SZ, kron_chain, random_mixed_state


def single_qubit_problem(target):
    z = [op for op in pauli_basis(1) if op.label == "Z"][0]
    return MaxEntProblem(((z, target),), (), 2)


def problem_from_state(rho, ops, aux=()):
    measured = tuple((op, expectation(rho, op)) for op in ops)
    return MaxEntProblem(measured, tuple(aux), rho.dim)


def finite_difference_gradient(problem, lam, step=1e-5):
    """Independent oracle: central differences of the objective."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam)
    for j in range(lam.size):
        up, down = lam.copy(), lam.copy()
        up[j] += step
        down[j] -= step
        out[j] = (objective(problem, up) - objective(problem, down)) / (2 * step)
    return out


class TestRhoOfLambda:
    def test_zero_multipliers_maximally_mixed(self):
        prob = problem_from_state(
            states.DensityMatrix(np.eye(8) / 8, 3), pauli_basis(3)[:5]
        )
        rho = rho_of_lambda(prob, np.zeros(5))
        assert np.allclose(rho.matrix, np.eye(8) / 8, atol=1e-14)

    def test_single_z_gibbs_tanh(self):
        # two-level Gibbs closed form: <Z> = tanh(lambda)
        prob = single_qubit_problem(0.0)
        for t in (-1.2, -0.3, 0.0, 0.4, 2.5):
            rho = rho_of_lambda(prob, [t])
            assert expectation(rho, SZ) == pytest.approx(np.tanh(t), abs=1e-12)

    def test_commuting_observables_factorize(self):
        zi = HermitianOperator(kron_chain(SZ, np.eye(2)), "ZI")
        iz = HermitianOperator(kron_chain(np.eye(2), SZ), "IZ")
        prob = MaxEntProblem(((zi, 0.0), (iz, 0.0)), (), 4)
        a, b = 0.7, -0.4
        rho = rho_of_lambda(prob, [a, b]).matrix

        def gibbs_1q(t):
            return np.diag([np.exp(t), np.exp(-t)]) / (np.exp(t) + np.exp(-t))

        assert np.allclose(rho, np.kron(gibbs_1q(a), gibbs_1q(b)), atol=1e-12)

    def test_large_multipliers_no_overflow(self):
        prob = single_qubit_problem(0.0)
        rho = rho_of_lambda(prob, [400.0])
        assert np.isfinite(rho.matrix).all()
        assert expectation(rho, SZ) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_finite(self):
        prob = single_qubit_problem(0.0)
        with pytest.raises(ValueError, match="finite"):
            rho_of_lambda(prob, [np.nan])

    def test_rejects_wrong_length(self):
        prob = single_qubit_problem(0.0)
        with pytest.raises(ValueError, match="multipliers"):
            rho_of_lambda(prob, [0.0, 1.0])


class TestObjective:
    def test_exact_targets_give_zero(self):
        rho = states.DensityMatrix(np.eye(8) / 8, 3)
        prob = problem_from_state(rho, pauli_basis(3)[:6])
        assert objective(prob, np.zeros(6)) == pytest.approx(0.0, abs=1e-24)

    def test_single_constraint_square(self):
        prob = single_qubit_problem(0.5)
        assert objective(prob, [0.0]) == pytest.approx(0.25)

    def test_empty_problem(self):
        prob = MaxEntProblem((), (), 8)
        assert objective(prob, []) == 0.0


class TestGradient:
    def test_single_z_at_origin(self):
        # d/dlambda (tanh(l) - a)^2 at 0 is -2a since var(Z) at I/2 is 1
        for a in (0.2, -0.6):
            prob = single_qubit_problem(a)
            assert gradient(prob, [0.0])[0] == pytest.approx(-2 * a, abs=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        ops = list(pauli_basis(3))
        idx = rng.choice(63, size=8, replace=False)
        prob = problem_from_state(rho, [ops[int(i)] for i in idx])
        lam = rng.normal(0, 0.5, 8)
        g = gradient(prob, lam)
        fd = finite_difference_gradient(prob, lam)
        assert np.linalg.norm(g - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-12)

    def test_matches_finite_differences_with_aux(self, rng):
        aux = build_symmetry("werner", 3).auxiliary[:10]
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        prob = problem_from_state(rho, pauli_basis(3)[:4], aux)
        lam = rng.normal(0, 0.3, prob.n_constraints)
        g = gradient(prob, lam)
        fd = finite_difference_gradient(prob, lam)
        assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(fd)

    def test_stationary_at_solution(self, rng):
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        prob = problem_from_state(rho, pauli_basis(3)[:10])
        sol = solve(prob, SolverOptions(step_rule="newton", tolerance=1e-22))
        assert np.linalg.norm(gradient(prob, sol.lambdas)) <= 1e-8

    def test_susceptibility_symmetric_psd(self, rng):
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        prob = problem_from_state(rho, pauli_basis(3)[:12])
        c = susceptibility(prob, rng.normal(0, 0.3, 12))
        assert np.allclose(c, c.T, atol=1e-12)
        assert np.linalg.eigvalsh(c)[0] >= -1e-10


class TestSolve:
    def test_no_constraints_exact_maximally_mixed(self):
        sol = solve(MaxEntProblem((), (), 8))
        assert sol.iterations == 0
        assert sol.converged
        assert np.max(np.abs(sol.rho.matrix - np.eye(8) / 8)) <= 1e-12

    def test_tanh_inversion(self):
        # lambda must match atanh(a); needs a tolerance tight enough that the
        # residual |tanh(l) - a| <= sqrt(tol) translates into 1e-6 on lambda
        opts = SolverOptions(tolerance=1e-16)
        for a in (0.0, 0.3, -0.3, 0.9, -0.9):
            sol = solve(single_qubit_problem(a), opts)
            assert sol.converged
            assert abs(sol.lambdas[0] - np.arctanh(a)) <= 1e-6

    def test_full_pauli_reconstruction_mixed(self, rng):
        opts = SolverOptions(step_rule="newton", tolerance=1e-18, max_iterations=200)
        for _ in range(3):
            rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
            prob = problem_from_state(rho, pauli_basis(3))
            sol = solve(prob, opts)
            assert states.fidelity(rho, sol.rho) >= 0.999

    def test_backtracking_default_small_problem(self, rng):
        rho = states.DensityMatrix(random_mixed_state(4, rng), 2)
        prob = problem_from_state(rho, pauli_basis(2)[:6])
        sol = solve(prob, SolverOptions(max_iterations=5000))
        assert sol.converged
        for (op, target) in prob.measured:
            assert expectation(sol.rho, op) == pytest.approx(target, abs=1e-5)

    def test_objective_non_increasing(self, rng):
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        prob = problem_from_state(rho, pauli_basis(3)[:20])
        for rule in ("backtracking", "newton"):
            sol = solve(
                prob,
                SolverOptions(step_rule=rule, max_iterations=300, record_history=True),
            )
            hist = np.array(sol.history)
            assert np.all(np.diff(hist) <= 1e-15)

    def test_fixed_step_rule_runs(self, rng):
        prob = single_qubit_problem(0.4)
        sol = solve(prob, SolverOptions(step_rule="fixed", step_init=0.5, max_iterations=2000))
        assert sol.converged

    def test_converged_false_on_infeasible(self, rng):
        # targets perturbed away from any quantum state: solver stalls at the
        # least-squares optimum and reports non-convergence
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        measured = tuple(
            (op, expectation(rho, op) + rng.normal(0, 0.1)) for op in pauli_basis(3)
        )
        prob = MaxEntProblem(measured, (), 8)
        sol = solve(prob, SolverOptions(step_rule="newton", max_iterations=400))
        assert not sol.converged
        assert sol.objective > 0
        assert np.isfinite(sol.rho.matrix).all()

    def test_constraints_met_within_sqrt_tolerance(self, rng):
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        prob = problem_from_state(rho, pauli_basis(3)[:15])
        opts = SolverOptions(step_rule="newton", tolerance=1e-12)
        sol = solve(prob, opts)
        assert sol.converged
        for (op, target) in prob.measured:
            assert abs(expectation(sol.rho, op) - target) <= np.sqrt(opts.tolerance)

    def test_werner_five_observables_maximum_fidelity(self, rng):
        # five surviving measurements plus the symmetry constraints pin the
        # state completely
        spec = build_symmetry("werner", 3)
        rho = states.random_werner(3, rng)
        from symmaxent.symmetry import filter_measured_observables

        kept = filter_measured_observables(sic_povm(3), spec.auxiliary)
        assert len(kept) == 5
        prob = problem_from_state(rho, list(kept), spec.auxiliary)
        sol = solve(prob, SolverOptions(step_rule="newton", tolerance=1e-14))
        assert states.fidelity(rho, sol.rho) >= 1 - 1e-3

    def test_symmetric_solution_commutes_with_generators(self, rng):
        spec = build_symmetry("permutation", 3)
        psi = states.haar_symmetric_pure(3, rng)
        rho = psi.density()
        kept = [op for op in sic_povm(3)][:30]
        from symmaxent.symmetry import filter_measured_observables
        from symmaxent.observables import ObservableSet

        filtered = filter_measured_observables(
            ObservableSet(tuple(kept), "custom", 3), spec.auxiliary
        )
        prob = problem_from_state(rho, list(filtered), spec.auxiliary)
        sol = solve(prob, SolverOptions(step_rule="newton", tolerance=1e-14))
        for g in spec.generators:
            assert np.linalg.norm(linalg.commutator(g, sol.rho.matrix)) <= 1e-6

    def test_pi_targets_give_permutation_invariant_solution(self, rng):
        spec = build_symmetry("permutation", 3)
        rho = states.haar_symmetric_pure(3, rng).density()
        from symmaxent.symmetry import filter_measured_observables

        filtered = filter_measured_observables(sic_povm(3), spec.auxiliary)
        prob = problem_from_state(rho, list(filtered)[:10], spec.auxiliary)
        sol = solve(prob, SolverOptions(step_rule="newton", tolerance=1e-14))
        averaged = states.permutation_average(sol.rho, 3)
        assert states.fidelity(sol.rho, averaged) >= 1 - 1e-8

    def test_entropy_optimality_against_perturbations(self, rng):
        # independent check of the entropy-maximization claim: perturb the
        # solution inside the null space of the constraint map (constraints
        # unchanged) and verify no perturbation has higher entropy
        rho = states.DensityMatrix(random_mixed_state(8, rng), 3)
        ops = list(pauli_basis(3))[:12]
        prob = problem_from_state(rho, ops)
        sol = solve(prob, SolverOptions(step_rule="newton", tolerance=1e-22))
        base_entropy = states.von_neumann_entropy(sol.rho)

        basis_cols = np.array([op.matrix.ravel() for op in ops]).T
        wmin = np.linalg.eigvalsh(sol.rho.matrix)[0]
        count = 0
        for _ in range(100):
            h = random_mixed_state(8, rng) - np.eye(8) / 8  # traceless hermitian
            coeffs, *_ = np.linalg.lstsq(basis_cols, h.ravel(), rcond=None)
            h_perp = h - np.tensordot(coeffs, [op.matrix for op in ops], axes=1)
            h_perp = (h_perp + h_perp.conj().T) / 2
            nrm = np.linalg.norm(h_perp)
            if nrm < 1e-12:
                continue
            eps = 0.5 * wmin / max(np.abs(np.linalg.eigvalsh(h_perp)).max(), 1e-12)
            cand = states.DensityMatrix(sol.rho.matrix + eps * h_perp, 3)
            for (op, target) in prob.measured:
                assert abs(expectation(cand, op) - target) <= 1e-6
            assert states.von_neumann_entropy(cand) <= base_entropy + 1e-6
            count += 1
        assert count >= 90

    def test_solution_json_round_trip(self, rng):
        prob = single_qubit_problem(0.3)
        sol = solve(prob)
        payload = sol.to_jsonable()
        assert set(payload) == {"rho", "lambdas", "objective", "iterations", "converged"}
        assert payload["converged"] is True


class TestValidation:
    def test_rejects_non_finite_target(self):
        z = pauli_basis(1)[2]
        with pytest.raises(ValueError, match="finite"):
            MaxEntProblem(((z, np.nan),), (), 2)

    def test_rejects_dim_mismatch(self):
        z = pauli_basis(1)[2]
        with pytest.raises(ValueError, match="dim"):
            MaxEntProblem(((z, 0.1),), (), 8)

    def test_solver_options_validation(self):
        with pytest.raises(ValueError):
            SolverOptions(tolerance=0.0)
        with pytest.raises(ValueError):
            SolverOptions(step_rule="bogus")
        with pytest.raises(ValueError):
            SolverOptions(lambda_init="supplied")

    def test_lambda0_supplied(self):
        prob = single_qubit_problem(0.5)
        start = (np.arctanh(0.5),)
        sol = solve(prob, SolverOptions(lambda_init="supplied", lambda0=start))
        assert sol.converged
        assert sol.iterations == 0
