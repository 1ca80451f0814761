"""src/network — ReLU 控制器网络"""
from src.network.io import load_network, network_from_dict, network_to_dict, save_network
from src.network.model import ForwardTrace, NeuralNetwork, controller, forward, validate

__all__ = [
    "ForwardTrace",
    "NeuralNetwork",
    "controller",
    "forward",
    "load_network",
    "network_from_dict",
    "network_to_dict",
    "save_network",
    "validate",
]
