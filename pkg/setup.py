from setuptools import setup, find_packages

from otlab import __version__

with open('requirements.txt', encoding='utf-8') as f:
    install_requires = [line.strip() for line in f if line.strip() and not line.startswith('pytest')]

setup(
    name='otlab',
    version=__version__,
    description='Numerical laboratory for boundary regularity of optimal transport maps',
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'tests.*']),
    py_modules=['run_lab'],
    include_package_data=True,
    package_data={'otlab': ['properties/*.yaml', 'properties/family/*.yaml']},
    install_requires=install_requires,
    extras_require={'lapjv': ['lapjv>=1.3.22'], 'test': ['pytest>=7.1.3']},
    python_requires='>=3.8',
    entry_points={'console_scripts': ['lab = run_lab:main']},
)
