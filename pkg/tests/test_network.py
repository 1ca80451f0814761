"""
测试网络模块

维度校验、前向求值与权重文件读写
"""
from pathlib import Path

import numpy as np
import pytest

from src.errors import DimensionMismatch, ParseError
from src.network.io import load_network, network_from_dict, network_to_dict, save_network
from src.network.model import NeuralNetwork, controller, forward


def _random_net(rng, sizes):
    layers = [(rng.normal(size=(o, i)), rng.normal(size=o)) for i, o in zip(sizes, sizes[1:])]
    return NeuralNetwork.from_layers(layers)


class TestValidate:
    """测试维度链校验"""

    def test_one_hidden_layer_ok(self):
        """测试 L=1, W0: 4×8, W1: 2×4"""
        net = NeuralNetwork.from_layers([(np.zeros((4, 8)), np.zeros(4)), (np.zeros((2, 4)), np.zeros(2))])
        assert net.input_dim == 8
        assert net.output_dim == 2
        assert net.layer_count == 1
        assert net.hidden_sizes == (4,)
        assert net.relu_count == 4

    def test_column_mismatch_reports_layer(self):
        """测试第 1 层列数与上一层神经元数不符"""
        with pytest.raises(DimensionMismatch) as exc:
            NeuralNetwork.from_layers(
                [(np.zeros((4, 8)), np.zeros(4)), (np.zeros((2, 5)), np.zeros(2))], input_dim=8, output_dim=2)
        assert exc.value.layer == 1

    def test_empty_hidden_layer(self):
        """测试空隐层"""
        with pytest.raises(DimensionMismatch):
            NeuralNetwork.from_layers(
                [(np.zeros((0, 8)), np.zeros(0)), (np.zeros((2, 0)), np.zeros(2))], input_dim=8, output_dim=2)

    def test_non_finite_weight(self):
        """测试非有限权重"""
        W = np.zeros((2, 4))
        W[0, 0] = np.nan
        with pytest.raises(DimensionMismatch):
            NeuralNetwork.from_layers([(W, np.zeros(2))])

    def test_bias_shape(self):
        """测试偏置长度不符"""
        with pytest.raises(DimensionMismatch):
            NeuralNetwork.from_layers([(np.zeros((2, 4)), np.zeros(3))], input_dim=4, output_dim=2)

    def test_relu_numbering(self):
        """测试全局 ReLU 编号与其逆映射"""
        net = _random_net(np.random.default_rng(0), [8, 3, 5, 2])
        assert net.relu_index(1, 0) == 1
        assert net.relu_index(2, 0) == 4
        assert net.relu_index(2, 4) == 8
        for k in range(1, net.relu_count + 1):
            assert net.relu_index(*net.relu_position(k)) == k
        with pytest.raises(IndexError):
            net.relu_position(net.relu_count + 1)


class TestForward:
    """测试前向求值"""

    def test_hand_evaluation(self):
        """测试手算示例"""
        net = NeuralNetwork.from_layers([(np.eye(2), np.zeros(2)), (np.array([[1.0, 1.0]]), np.zeros(1))])
        trace = forward(net, np.array([1.0, -1.0]))
        np.testing.assert_array_equal(trace.activations[0], [1.0, 0.0])
        np.testing.assert_array_equal(trace.output, [1.0])
        assert trace.flat_phases() == (True, False)

    def test_zero_weights(self):
        """测试零权重时输出为末层偏置，负偏置下相位全为 False"""
        net = NeuralNetwork.from_layers([
            (np.zeros((3, 4)), -np.ones(3)),
            (np.zeros((2, 3)), np.array([0.5, -0.25])),
        ])
        trace = forward(net, np.array([1.0, 2.0, 3.0, 4.0]))
        np.testing.assert_array_equal(trace.output, [0.5, -0.25])
        assert trace.flat_phases() == (False, False, False)

    def test_zero_pre_activation_is_inactive(self):
        """测试 t 恰为 0 时相位为 False"""
        net = NeuralNetwork.from_layers([(np.zeros((1, 2)), np.zeros(1)), (np.ones((1, 1)), np.zeros(1))])
        assert forward(net, np.zeros(2)).flat_phases() == (False,)

    def test_matches_plain_loop(self):
        """测试随机两隐层网络与逐元素实现一致"""
        rng = np.random.default_rng(42)
        net = _random_net(rng, [6, 5, 4, 2])
        for _ in range(10):
            d = rng.normal(size=6)
            h = list(d)
            for W, w in zip(net.weights[:-1], net.biases[:-1]):
                h = [max(0.0, sum(W[i][j] * h[j] for j in range(len(h))) + w[i]) for i in range(len(w))]
            W, w = net.weights[-1], net.biases[-1]
            u = [sum(W[i][j] * h[j] for j in range(len(h))) + w[i] for i in range(len(w))]
            np.testing.assert_allclose(forward(net, d).output, u, atol=1e-12)

    def test_controller_batch(self):
        """测试批量控制器与逐个前向求值一致"""
        rng = np.random.default_rng(1)
        net = _random_net(rng, [8, 4, 4, 2])
        ds = rng.normal(size=(20, 8))
        batch = controller(net, ds)
        for d, u in zip(ds, batch):
            np.testing.assert_allclose(u, forward(net, d).output, atol=1e-12)

    def test_affine_network(self):
        """测试没有隐层的纯仿射控制器"""
        net = NeuralNetwork.from_layers([(np.array([[1.0, 2.0]]), np.array([0.5]))])
        assert net.layer_count == 0
        assert net.relu_count == 0
        np.testing.assert_allclose(forward(net, np.array([1.0, 1.0])).output, [3.5])

    def test_wrong_input_length(self):
        """测试输入维度不符"""
        net = _random_net(np.random.default_rng(0), [4, 2, 2])
        with pytest.raises(DimensionMismatch):
            forward(net, np.zeros(5))


class TestNetworkIO:
    """测试权重文件读写"""

    def test_round_trip(self, tmp_path):
        """测试保存后读回逐位相同"""
        net = _random_net(np.random.default_rng(9), [8, 4, 3, 2])
        path = save_network(net, tmp_path / "net.json")
        loaded = load_network(path)
        assert loaded.input_dim == net.input_dim
        assert loaded.output_dim == net.output_dim
        for a, b in zip(loaded.weights + loaded.biases, net.weights + net.biases):
            np.testing.assert_array_equal(a, b)

    def test_malformed_json(self, tmp_path):
        """测试 JSON 语法错误"""
        path = tmp_path / "net.json"
        path.write_text('{"layers": [', encoding="utf-8")
        with pytest.raises(ParseError):
            load_network(path)

    def test_schema_violation(self, tmp_path):
        """测试缺少必需字段"""
        path = tmp_path / "net.json"
        path.write_text('{"layers": []}', encoding="utf-8")
        with pytest.raises(ParseError):
            load_network(path)

    def test_declared_dims_mismatch(self):
        """测试声明的 input_dim 与权重列数不符"""
        data = network_to_dict(_random_net(np.random.default_rng(2), [8, 4, 2]))
        data["input_dim"] = 6
        with pytest.raises(DimensionMismatch):
            network_from_dict(data)

    def test_ragged_rows(self):
        """测试参差不齐的权重行"""
        data = {"input_dim": 2, "output_dim": 1, "layers": [{"W": [[1.0, 2.0], [3.0]], "w": [0.0, 0.0]},
                                                           {"W": [[1.0, 1.0]], "w": [0.0]}]}
        with pytest.raises(DimensionMismatch):
            network_from_dict(data)

    def test_data_fixture(self):
        """测试示例网络文件"""
        net = load_network(Path(__file__).resolve().parent.parent / "data" / "centering_net.json")
        assert net.input_dim == 24
        assert net.output_dim == 2
        assert net.hidden_sizes == (4,)
