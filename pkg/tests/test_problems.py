import numpy as np
import pytest

from oracles import brute_front, dtlz7_scalar, wfg_scalar
from skmors.errors import GenerationError, InvalidInputError
from skmors.problems import (
    CandidateSet,
    NoiseSpec,
    Simulator,
    dtlz7,
    eval_true,
    generate_candidates,
    get_problem,
    noise_sd,
    optimal_designs,
    sample_observation,
    wfg,
)

# Three-objective reference values (n_var=10, k=2) from an independent WFG implementation.
WFG3_X = np.array([
    [1.38663349883148, 1.39095701793336, 1.00651400424944, 1.08124749578659, 3.08488862377431,
     7.97168781965395, 7.76075416049597, 2.66837163922627, 5.08502619704711, 15.0825267506388],
    [0.857279299089974, 2.90178703928795, 0.562662124363031, 1.62200945196832, 9.21877546951233,
     9.18323121613658, 12.9452537606931, 9.4066087893712, 11.1373467719423, 11.1228130773289],
    [0.972828288318792, 3.30043205456895, 1.59130876555149, 1.25130637703317, 9.72493287754122,
     1.25826747229887, 5.77792241569192, 12.8549248376846, 13.5182364945479, 13.0712479627488],
    [0.05787696298673, 2.73844307514897, 3.35587141949041, 2.27927716922222, 1.05777033975633,
     6.60828440953838, 10.2633126093307, 10.7126816889197, 15.6329278855848, 3.34290219455068],
])
WFG3_Y = np.array([
    [1.06023017837464, 2.04814437461039, 2.30521208140447],
    [1.12327366377001, 1.2143893538016, 4.01028813045063],
    [1.2509300110279, 1.18625072894685, 3.66233319316531],
    [0.510007955859936, 0.523689192220033, 6.30235283702863],
])
WFG4_X = np.array([
    [1.13783890382196, 0.39981342549122, 2.57104400359446, 7.38059326152385, 0.18024697236177,
     4.76511856888059, 4.94868612529733, 5.03603867466566, 1.57950371631846, 5.02059681386812],
    [1.24461287529011, 3.47327010872662, 5.43623388146076, 7.94615451354421, 5.40004134634819,
     1.01695950794045, 5.48432969385307, 1.62513156036691, 5.43756079090007, 16.845612279212],
    [1.3483917307458, 3.40633721753899, 5.78151771907546, 2.63492324427142, 6.94416921281742,
     2.88016099935476, 13.1911070274896, 2.97957306442058, 3.87758428471048, 11.4314968749729],
    [1.04757801036099, 1.88111694935307, 2.00402875380894, 5.70334301516702, 4.55333751888472,
     8.27804323815833, 6.40662120721998, 8.26948687327702, 0.229783478365364, 13.1661986496426],
])
WFG4_Y = np.array([
    [0.706332603289956, 1.14447455569412, 6.03537463248557],
    [0.963434680277201, 1.09292165133283, 6.05832165357606],
    [1.07075915988437, 1.19846384116053, 5.82348456594644],
    [0.334946480439561, 0.839576787685893, 6.19071079640542],
])


def _domain_points(p, rng, n):
    return rng.uniform(p.lower, p.upper, size=(n, p.d))


@pytest.mark.parametrize("name", ["WFG3", "WFG4"])
def test_wfg_matches_scalar_oracle(name, rng):
    p = get_problem(name)
    X = _domain_points(p, rng, 100)
    F = eval_true(p, X)
    for x, f in zip(X, F):
        np.testing.assert_allclose(f, wfg_scalar(x, p.k, name), rtol=0, atol=1e-9)


def test_dtlz7_matches_scalar_oracle(rng):
    p = get_problem("DTLZ7")
    X = _domain_points(p, rng, 100)
    F = eval_true(p, X)
    for x, f in zip(X, F):
        np.testing.assert_allclose(f, dtlz7_scalar(x), rtol=0, atol=1e-9)


@pytest.mark.parametrize("which,X,Y", [("WFG3", WFG3_X, WFG3_Y), ("WFG4", WFG4_X, WFG4_Y)])
def test_wfg_three_objective_reference_values(which, X, Y):
    np.testing.assert_allclose(wfg(X, 3, 2, which), Y, rtol=0, atol=1e-10)


def test_dtlz7_origin():
    np.testing.assert_allclose(eval_true(get_problem("DTLZ7"), [0.0, 0.0]), [0.0, 4.0], atol=1e-12)
    np.testing.assert_allclose(dtlz7([[0.0, 0.0]])[0], [0.0, 4.0], atol=1e-12)


def test_wfg4_optimal_set_on_ellipse(rng):
    p = get_problem("WFG4")
    F = eval_true(p, optimal_designs(p, rng, 200))
    np.testing.assert_allclose((F[:, 0] / 2) ** 2 + (F[:, 1] / 4) ** 2, 1.0, atol=1e-9)


def test_wfg3_optimal_set_on_line(rng):
    p = get_problem("WFG3")
    F = eval_true(p, optimal_designs(p, rng, 200))
    np.testing.assert_allclose(F[:, 0] / 2 + F[:, 1] / 4, 1.0, atol=1e-9)


def test_dtlz7_optimal_designs_are_nondominated(rng):
    p = get_problem("DTLZ7")
    F = eval_true(p, optimal_designs(p, rng, 60))
    assert len(brute_front(F)) == 60


def test_out_of_domain_rejected():
    p = get_problem("WFG4")
    x = np.zeros(p.d)
    x[0] = -0.1
    with pytest.raises(InvalidInputError):
        eval_true(p, x)
    with pytest.raises(InvalidInputError):
        eval_true(p, np.zeros(p.d + 1))
    with pytest.raises(InvalidInputError):
        get_problem("ZDT1")


@pytest.mark.parametrize("name,size,n_pareto", [("WFG3", 100, 20), ("WFG4", 100, 20), ("DTLZ7", 100, 50)])
def test_generated_sets_have_requested_shape(name, size, n_pareto):
    cset = generate_candidates(get_problem(name), size, n_pareto, seed=3)
    assert cset.size == size
    assert cset.labels.sum() == n_pareto
    # labels agree with brute-force dominance on the true objectives
    assert sorted(brute_front(cset.objectives)) == cset.truth.tolist()
    np.testing.assert_allclose(cset.objectives, eval_true(cset.problem, cset.designs))


def test_uniform_geometry_also_labels_correctly():
    cset = generate_candidates(get_problem("WFG4"), 40, 8, seed=1, proximity=False)
    assert cset.labels.sum() == 8
    assert sorted(brute_front(cset.objectives)) == cset.truth.tolist()


def test_generation_is_deterministic():
    p = get_problem("WFG4")
    a = generate_candidates(p, 30, 6, seed=11)
    b = generate_candidates(p, 30, 6, seed=11)
    np.testing.assert_array_equal(a.designs, b.designs)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_generation_budget_exhausted():
    with pytest.raises(GenerationError):
        generate_candidates(get_problem("WFG4"), 100, 20, seed=0, max_draws=10)


def test_generation_rejects_bad_sizes():
    with pytest.raises(InvalidInputError):
        generate_candidates(get_problem("WFG4"), 10, 11, seed=0)
    with pytest.raises(InvalidInputError):
        generate_candidates(get_problem("WFG4"), 10, 0, seed=0)


def test_candidate_json_round_trip(tmp_path):
    cset = generate_candidates(get_problem("DTLZ7"), 30, 10, seed=5)
    path = tmp_path / "c.json"
    cset.save(path)
    back = CandidateSet.load(path)
    assert back.problem == cset.problem
    np.testing.assert_array_equal(back.designs, cset.designs)
    np.testing.assert_array_equal(back.objectives, cset.objectives)
    np.testing.assert_array_equal(back.labels, cset.labels)
    np.testing.assert_array_equal(back.rf, cset.rf)
    assert back.seed == cset.seed and back.proximity == cset.proximity


def test_candidate_json_wrong_format():
    with pytest.raises(InvalidInputError):
        CandidateSet.from_json('{"format": "other", "version": 1}')


def test_noise_sd_endpoints():
    cset = generate_candidates(get_problem("WFG4"), 30, 6, seed=2)
    spec = NoiseSpec.of("high")
    fmin = cset.objectives.min(axis=0)
    fmax = cset.objectives.max(axis=0)
    np.testing.assert_allclose(noise_sd(cset, spec, fmin[None]), [1.0 * cset.rf], rtol=1e-12)
    np.testing.assert_allclose(noise_sd(cset, spec, fmax[None]), [2.0 * cset.rf], rtol=1e-12)
    mid = (fmin + fmax) / 2
    np.testing.assert_allclose(noise_sd(cset, spec, mid[None]), [1.5 * cset.rf], rtol=1e-12)
    sd = noise_sd(cset, spec)
    assert np.all(sd >= cset.rf - 1e-12) and np.all(sd <= 2 * cset.rf + 1e-12)


def test_noise_levels():
    assert NoiseSpec.of("zero") == NoiseSpec("zero", 0.0, 0.0)
    assert NoiseSpec.of("Low") == NoiseSpec("low", 0.001, 0.5)
    assert NoiseSpec.of("medium") == NoiseSpec("medium", 0.01, 1.0)
    with pytest.raises(InvalidInputError):
        NoiseSpec.of("extreme")


def test_sample_observation_moments():
    rng = np.random.default_rng(99)
    f = np.array([1.0, -2.0])
    sd = np.array([0.3, 2.0])
    n = 100_000
    Y = sample_observation(f, sd, rng, size=n)
    assert np.all(np.abs(Y.mean(axis=0) - f) < 4 * sd / np.sqrt(n))
    np.testing.assert_allclose(Y.std(axis=0, ddof=1), sd, rtol=0.02)


def test_simulator_counts_calls_and_respects_zero_noise():
    cset = generate_candidates(get_problem("WFG4"), 20, 4, seed=0)
    streams = [np.random.default_rng(i) for i in range(cset.size)]
    sim = Simulator(cset, NoiseSpec.of("zero"), streams)
    Y = sim.sample(3, 7)
    assert Y.shape == (7, 2)
    np.testing.assert_array_equal(Y, np.tile(cset.objectives[3], (7, 1)))
    assert sim.sample(0, 0).shape == (0, 2)
    assert sim.calls == 7
