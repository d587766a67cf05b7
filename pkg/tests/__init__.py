# Empty file to make tests a Python package