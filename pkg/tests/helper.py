from contextlib import contextmanager
from faker import Faker
from io import StringIO
import json
import os
import sys
import tempfile

from eprwit.state_catalog import make_coherent_pair, make_thermal_coherent
from eprwit.witness_bounds import TestFunction


@contextmanager
def captured_output():
    new_out, new_err = StringIO(), StringIO()
    old_out, old_err = sys.stdout, sys.stderr
    try:
        sys.stdout, sys.stderr = new_out, new_err
        yield sys.stdout, sys.stderr
    finally:
        sys.stdout, sys.stderr = old_out, old_err


@contextmanager
def temp_path(suffix=""):
    handle, path = tempfile.mkstemp(suffix=suffix)
    os.close(handle)
    try:
        yield path
    finally:
        if os.path.exists(path):
            os.remove(path)


@contextmanager
def config_file(config):
    with temp_path(suffix=".json") as path:
        with open(path, "w") as f:
            if isinstance(config, str):
                f.write(config)
            else:
                json.dump(config, f)
        yield path


class StateHelper(object):
    def __init__(self, seed=1234):
        self.faker = Faker()
        self.faker.seed_instance(seed)

    def amplitude(self, limit=0.8):
        x = self.faker.random.uniform(-limit, limit)
        y = self.faker.random.uniform(-limit, limit)
        return complex(x, y)

    def coherent_pair(self):
        return make_coherent_pair(self.amplitude(), self.amplitude())

    def thermal_coherent(self):
        nth = self.faker.random.uniform(0.01, 0.3)
        return make_thermal_coherent(nth, self.amplitude())

    def product_states(self, count=3):
        states = []
        for i in range(count):
            states.append(self.coherent_pair() if i % 2 == 0 else self.thermal_coherent())
        return states

    def test_function(self, max_c=3.0, max_d=5.0):
        C = self.faker.random.uniform(0.2, max_c)
        D = self.faker.random.uniform(-max_d, max_d)
        return TestFunction.exponential(C, D)
