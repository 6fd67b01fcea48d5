"""Domain core: entities, ports and use cases per module"""
