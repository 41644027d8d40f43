import pytest

from framepbo.config import (
    PAPER_COLONY,
    ConfigError,
    apply_preset,
    default_config_text,
    load_config,
    parse_config,
)
from framepbo.frame import GeometryConfig


class TestParse:
    def test_defaults(self):
        cfg = parse_config(default_config_text())
        assert cfg.case == "story4" and cfg.levels == ("IO", "LS", "CP")
        assert cfg.abc.N_p == 30 and cfg.abc.seed == 0

    def test_empty_text_is_default(self):
        cfg = parse_config("")
        assert cfg.case == "story4"

    def test_sections(self):
        text = """
[run]
case = story8
levels = I-O, CP
seed = 9
[abc]
N_p = 20
VCP = 0.3
abort_on_divergence = yes
[geometry]
bay_width_m = 6.0
[materials]
f_c_prime = 35
[spectrum]
S_a_CP = 1.2
C1 = 1.1
t_c = 0.6
[penalty]
K = 2
"""
        cfg = parse_config(text)
        assert cfg.case == "story8" and cfg.levels == ("IO", "CP")
        assert (cfg.abc.N_p, cfg.abc.VCP, cfg.abc.seed, cfg.abc.abort_on_divergence) == (20, 0.3, 9, True)
        assert cfg.geometry == GeometryConfig(bay_width_m=6.0)
        assert cfg.materials.f_c_prime == 35
        assert dict(cfg.seismic.S_a)["CP"] == 1.2 and cfg.seismic.C1 == 1.1 and cfg.seismic.t_c == 0.6
        assert cfg.penalty.K == 2

    @pytest.mark.parametrize("text", [
        "[run]\nlevels =\n",
        "[run]\nlevels = XX\n",
        "[run]\ncase = story5\n",
        "[nonsense]\n",
        "[abc]\nN_p = 1\n",
        "[abc]\nbees = 3\n",
        "[geometry]\nbay_width_m = -1\n",
        "[materials]\nf_c_prime = abc\n",
        "[bounds]\nslab = 1:2\n",
        "[bounds]\nbeam = 3\n",
        "[spectrum]\nS_a_XX = 1\n",
    ])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_custom_and_bounds(self, catalogs, tiny_config_text):
        cfg = parse_config(tiny_config_text.format(seed=1, threads=1))
        model = cfg.model()
        assert model.n_stories == 2 and model.group_names("beam") == ["B"]
        assert cfg.design_bounds(model, catalogs) == [(10, 14), (20, 24)]

    def test_bounds_outside_catalog(self, catalogs):
        cfg = parse_config("[bounds]\nbeam = 1:99\n")
        with pytest.raises(ConfigError):
            cfg.design_bounds(cfg.model(), catalogs)

    def test_design_section(self):
        cfg = parse_config("[design]\nbeams = 1,2,3,4\ncolumns = 5,6,7,8\nwalls = 1,1,1,1\n")
        assert cfg.design == (1, 2, 3, 4, 5, 6, 7, 8, 1, 1, 1, 1)

    def test_relative_paths(self, tmp_path):
        p = tmp_path / "run.ini"
        p.write_text("[run]\noutput_dir = out\n[data]\ndata_dir = fixtures\n")
        cfg = load_config(p)
        assert cfg.output_dir == str(tmp_path / "out") and cfg.data_dir == str(tmp_path / "fixtures")


class TestPresets:
    @pytest.mark.parametrize("name, level", [("paper-io", "IO"), ("paper-ls", "LS"), ("paper-cp", "CP")])
    def test_level_presets(self, name, level):
        cfg = apply_preset(parse_config(""), name)
        assert cfg.levels == (level,)
        abc = cfg.abc_for(level, ((1, 2),))
        assert (abc.N_p, abc.I_max) == PAPER_COLONY["story4"][level]

    def test_story8_ls(self):
        cfg = apply_preset(parse_config("[run]\ncase = story8\n"), "paper")
        assert (cfg.abc_for("LS", ()).N_p, cfg.abc_for("LS", ()).I_max) == (55, 80)

    def test_desk(self):
        cfg = apply_preset(parse_config(""), "desk")
        assert (cfg.abc.N_p, cfg.abc.I_max) == (20, 40)

    def test_unknown(self):
        with pytest.raises(ConfigError):
            apply_preset(parse_config(""), "fast")

    def test_preset_key(self):
        assert parse_config("[run]\npreset = paper-cp\n").levels == ("CP",)
