from otlab.config.configurator import Config
