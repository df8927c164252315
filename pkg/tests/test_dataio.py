import json

import pytest
from numpy.testing import assert_allclose

from dimer_discord.dataio import (
    PRESETS,
    MaterialPreset,
    ResultRecord,
    load_series,
    parse_value_with_uncertainty,
    preset,
    result_from_correlator,
    write_results,
)
from dimer_discord.dimer_core import measures_from_correlator
from dimer_discord.errors import DataError, InconsistencyError
from dimer_discord.numerics import ValueWithUncertainty


class TestLoadSeries:
    def test_basic_susceptibility(self, tmp_path):
        f = tmp_path / "chi.csv"
        f.write_text(
            "# powder record\nT_K,chi_emu_per_mol,sigma_chi\n"
            "4.0,0.126,0.002\n2.0,0.110,0.002\n"
        )
        s = load_series(f, "susceptibility")
        assert s.kind == "susceptibility"
        assert_allclose(s.temperatures, [2.0, 4.0])  # sorted on load
        assert_allclose(s.values, [0.110, 0.126])
        assert_allclose(s.sigmas, [0.002, 0.002])
        assert s.units == "chi_emu_per_mol"
        assert len(s) == 2

    def test_sigma_column_optional(self, tmp_path):
        f = tmp_path / "g.csv"
        f.write_text("T_K,G\n4.0,-0.54\n")
        s = load_series(f, "correlator")
        assert s.sigmas is None

    def test_per_monomer_doubles_values_and_sigmas(self, tmp_path):
        f = tmp_path / "chi.csv"
        f.write_text("T_K,chi_emu_per_mol,sigma_chi\n4.0,0.063,0.001\n")
        s = load_series(f, "susceptibility", normalization="per_monomer")
        assert_allclose(s.values, [0.126])
        assert_allclose(s.sigmas, [0.002])
        assert_allclose(s.temperatures, [4.0])  # temperatures never rescale
        assert s.normalization == "per_dimer"  # stored values are converted

    def test_joule_units_divide_by_gas_constant(self, tmp_path):
        f = tmp_path / "cm.csv"
        f.write_text("T_K,cm_J_per_mol_K\n4.0,3.43\n")
        s = load_series(f, "specific_heat")
        assert_allclose(s.values, [3.43 / 8.31446261815324], rtol=1e-12)
        assert s.units == "cm_over_R"  # canonical tag after conversion

    def test_correlator_rejects_per_monomer(self, tmp_path):
        f = tmp_path / "g.csv"
        f.write_text("T_K,G\n4.0,-0.54\n")
        with pytest.raises(DataError):
            load_series(f, "correlator", normalization="per_monomer")

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        f = tmp_path / "cm.csv"
        f.write_text("# run 7\n\nT_K,cm_over_R\n# mid-file note\n1.0,0.5\n\n2.0,0.9\n")
        s = load_series(f, "specific_heat")
        assert len(s) == 2

    def test_extra_columns_ignored(self, tmp_path):
        f = tmp_path / "g.csv"
        f.write_text("T_K,G,sigma_G,channel,note\n4.0,-0.54,0.09,neutron,ok\n")
        s = load_series(f, "correlator")
        assert_allclose(s.values, [-0.54])
        assert_allclose(s.sigmas, [0.09])

    def test_missing_header_column(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("temp,G\n4.0,-0.5\n")
        with pytest.raises(DataError, match="T_K"):
            load_series(f, "correlator")

    def test_wrong_value_column_for_kind(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G\n4.0,-0.5\n")
        with pytest.raises(DataError):
            load_series(f, "susceptibility")

    def test_malformed_row_reports_line_number(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G\n4.0,-0.5\n5.0,oops\n")
        with pytest.raises(DataError, match=r"bad\.csv:3"):
            load_series(f, "correlator")

    def test_short_row_reports_line_number(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G\n4.0\n")
        with pytest.raises(DataError, match=r"bad\.csv:2"):
            load_series(f, "correlator")

    def test_nonpositive_temperature_rejected(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G\n0.0,-0.5\n")
        with pytest.raises(DataError):
            load_series(f, "correlator")

    def test_duplicate_temperature_rejected(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G\n4.0,-0.5\n4.0,-0.5\n")
        with pytest.raises(DataError):
            load_series(f, "correlator")

    def test_partial_sigma_column_rejected(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G,sigma_G\n4.0,-0.5,0.1\n5.0,-0.4,\n")
        with pytest.raises(DataError):
            load_series(f, "correlator")

    def test_negative_sigma_rejected(self, tmp_path):
        f = tmp_path / "bad.csv"
        f.write_text("T_K,G,sigma_G\n4.0,-0.5,-0.1\n")
        with pytest.raises(DataError):
            load_series(f, "correlator")

    def test_header_only_file_is_an_empty_series(self, tmp_path):
        f = tmp_path / "empty.csv"
        f.write_text("T_K,G\n")
        s = load_series(f, "correlator")
        assert len(s) == 0

    def test_unknown_kind(self, tmp_path):
        f = tmp_path / "x.csv"
        f.write_text("T_K,G\n4.0,-0.5\n")
        with pytest.raises(DataError):
            load_series(f, "magnetization")


class TestPresets:
    def test_registry_contents(self):
        expected = {
            "copper-nitrate-calorimetric": (-2.59, None),
            "copper-nitrate-magnetometric": (-2.56, 2.11),
            "copper-acetate-hydrate": (-204.0, 2.13),
            "copper-acetate-anhydrous": (-216.0, 2.17),
            "cu2l-oac-ferro": (35.4, 2.13),
        }
        assert set(PRESETS) == set(expected)
        for name, (j, g) in expected.items():
            m = preset(name)
            assert isinstance(m, MaterialPreset)
            assert m.j_over_kb == j
            assert m.g_factor == g
            p = m.parameters
            assert p.j_over_kb == j
            assert p.antiferro == (j < 0)

    def test_unknown_name_lists_known_ones(self):
        with pytest.raises(DataError, match="copper-nitrate-calorimetric"):
            preset("copper-sulfate")


class TestResultRecord:
    def test_internal_consistency_enforced(self):
        m = measures_from_correlator(-0.54)
        with pytest.raises(InconsistencyError):
            ResultRecord(
                t=4.0,
                correlator=ValueWithUncertainty(-0.54),
                discord=ValueWithUncertainty(m.discord + 1e-6),
                classical=m.classical,
                mutual_information=m.mutual_information,
                entanglement=m.entanglement,
                channel="neutron",
            )

    def test_unknown_channel_rejected(self):
        with pytest.raises(DataError):
            result_from_correlator(4.0, ValueWithUncertainty(-0.54), "muon")

    def test_sigma_propagation(self):
        rec = result_from_correlator(4.0, ValueWithUncertainty(-0.54, 0.09), "neutron")
        assert_allclose(rec.discord.value, 0.301676054618512, rtol=1e-12)
        assert_allclose(rec.discord.sigma, 0.0910441098866698, rtol=1e-10)
        assert_allclose(rec.entanglement, 0.16671039951657748, rtol=1e-10)

    def test_zero_sigma_propagates_zero(self):
        rec = result_from_correlator(4.0, ValueWithUncertainty(-0.54), "theory")
        assert rec.discord.sigma == 0.0


class TestWriteResults:
    def records(self):
        return [
            result_from_correlator(4.0, ValueWithUncertainty(-0.54, 0.09), "neutron"),
            result_from_correlator(2.0, ValueWithUncertainty(-0.71, 0.05), "neutron"),
        ]

    def test_empty_csv_is_header_only(self):
        out = write_results([], fmt="csv")
        assert out == b"T_K,G,sigma_G,Q,sigma_Q,C,I,E,channel\n"

    def test_csv_values(self):
        out = write_results(self.records(), fmt="csv").decode()
        lines = out.strip().split("\n")
        assert lines[0] == "T_K,G,sigma_G,Q,sigma_Q,C,I,E,channel"
        assert lines[1].startswith("4,-0.54,0.09,0.301676,0.0910441,")
        assert lines[1].endswith(",neutron")
        assert len(lines) == 3

    def test_six_significant_digits_default(self):
        out = write_results(self.records(), fmt="csv").decode()
        assert "0.301676" in out and "0.3016761" not in out

    def test_precision_override(self):
        out = write_results(self.records(), fmt="csv", precision=9).decode()
        assert "0.301676055" in out

    def test_deterministic(self):
        a = write_results(self.records(), fmt="csv", preset_name="x")
        b = write_results(self.records(), fmt="csv", preset_name="x")
        assert a == b

    def test_json_meta_and_rows(self):
        out = json.loads(write_results(self.records(), fmt="json", preset_name="cn"))
        assert out["meta"]["channel"] == "neutron"
        assert out["meta"]["preset"] == "cn"
        assert out["meta"]["units"]["T_K"] == "kelvin"
        assert len(out["rows"]) == 2
        row = out["rows"][0]
        assert set(row) >= {"T_K", "G", "sigma_G", "Q", "sigma_Q", "C", "I", "E"}
        assert_allclose(row["Q"], 0.301676, rtol=1e-6)

    def test_mixed_channels_marked(self):
        recs = [
            result_from_correlator(4.0, ValueWithUncertainty(-0.5), "neutron"),
            result_from_correlator(4.0, ValueWithUncertainty(-0.5), "theory"),
        ]
        out = json.loads(write_results(recs, fmt="json"))
        assert out["meta"]["channel"] == "mixed"

    def test_csv_output_reloads_as_correlator_series(self, tmp_path):
        # the writer's schema doubles as a valid correlator input file
        f = tmp_path / "out.csv"
        f.write_bytes(write_results(self.records(), fmt="csv"))
        s = load_series(f, "correlator")
        assert_allclose(s.temperatures, [2.0, 4.0])
        assert_allclose(s.values, [-0.71, -0.54])
        assert_allclose(s.sigmas, [0.05, 0.09])

    def test_unknown_format(self):
        with pytest.raises(DataError):
            write_results([], fmt="yaml")


class TestParseValueWithUncertainty:
    def test_parenthesis_form(self):
        v = parse_value_with_uncertainty("-0.54(9)")
        assert v.value == -0.54
        assert_allclose(v.sigma, 0.09, rtol=1e-12)

    def test_unicode_minus(self):
        v = parse_value_with_uncertainty("−0.54(9)")
        assert v.value == -0.54

    def test_multi_digit_uncertainty(self):
        v = parse_value_with_uncertainty("1.5(12)")
        assert v.value == 1.5
        assert_allclose(v.sigma, 1.2, rtol=1e-12)

    def test_zero_uncertainty(self):
        assert parse_value_with_uncertainty("-1(0)").sigma == 0.0
        assert parse_value_with_uncertainty("-1(0)").value == -1.0

    def test_bare_number(self):
        v = parse_value_with_uncertainty("0.126")
        assert v.value == 0.126
        assert v.sigma == 0.0

    def test_integer_mantissa(self):
        v = parse_value_with_uncertainty("12(3)")
        assert v.value == 12.0
        assert v.sigma == 3.0

    def test_exponent_applies_to_both(self):
        v = parse_value_with_uncertainty("1.23(4)e-2")
        assert_allclose(v.value, 0.0123, rtol=1e-12)
        assert_allclose(v.sigma, 4e-4, rtol=1e-12)

    def test_malformed(self):
        for text in ("", "abc", "1.2(", "1.2(3", "(3)", "1.2(x)", "--1"):
            with pytest.raises(DataError):
                parse_value_with_uncertainty(text)
