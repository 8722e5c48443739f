# Core unit tests package
